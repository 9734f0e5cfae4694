//! File formats: JSON records in, JSON or CSV out, every float written with 17
//! significant digits so golden files diff cleanly.

use std::io;

use anyhow::{bail, Context, Result};
use hyperpolygon::hp_tangent::TangentHP;
use hyperpolygon::hyperpolygon::QuiverRep;
use hyperpolygon::mat2::{Covec2, Mat2, Vec2, C};
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

pub type Pair = [f64; 2];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TangentRecord {
    pub xdot: Vec<[Pair; 2]>,
    pub ydot: Vec<[Pair; 2]>,
}

/// A quiver representation with its weights; `x` holds column pairs and `y` row pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepRecord {
    pub n: usize,
    pub beta: Vec<f64>,
    pub x: Vec<[Pair; 2]>,
    pub y: Vec<[Pair; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub punctures: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangent: Option<TangentRecord>,
}

/// Only the weights, for commands that need nothing else.
#[derive(Clone, Debug, Deserialize)]
pub struct BetaRecord {
    pub beta: Vec<f64>,
}

pub fn pair(z: C<f64>) -> Pair {
    [z.re, z.im]
}

pub fn cplx(p: &Pair) -> C<f64> {
    C::new(p[0], p[1])
}

pub fn mat_record(m: &Mat2<f64>) -> [[Pair; 2]; 2] {
    [[pair(m.0[0][0]), pair(m.0[0][1])], [pair(m.0[1][0]), pair(m.0[1][1])]]
}

impl RepRecord {
    pub fn from_rep(rep: &QuiverRep<f64>, beta: &[f64]) -> Self {
        RepRecord {
            n: rep.n(),
            beta: beta.to_vec(),
            x: rep.x.iter().map(|v| [pair(v.0[0]), pair(v.0[1])]).collect(),
            y: rep.y.iter().map(|v| [pair(v.0[0]), pair(v.0[1])]).collect(),
            punctures: None,
            tangent: None,
        }
    }

    /// Length agreement between `n`, `beta`, `x`, `y` and the optional parts.
    pub fn check_shape(&self) -> Result<()> {
        let n = self.n;
        if n < 3 {
            bail!("n = {n} but at least 3 branches are needed");
        }
        if self.beta.len() != n || self.x.len() != n || self.y.len() != n {
            bail!("n = {n} but beta, x, y have lengths {}, {}, {}", self.beta.len(), self.x.len(), self.y.len());
        }
        if self.punctures.as_ref().is_some_and(|p| p.len() != n) {
            bail!("punctures must have length {n}");
        }
        if let Some(t) = &self.tangent {
            if t.xdot.len() != n || t.ydot.len() != n {
                bail!("tangent must have {n} entries in xdot and ydot");
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        let flat = |v: &[[Pair; 2]]| v.iter().flatten().flatten().all(|a| a.is_finite());
        self.beta.iter().all(|b| b.is_finite()) && flat(&self.x) && flat(&self.y)
    }

    pub fn rep(&self) -> QuiverRep<f64> {
        QuiverRep {
            x: self.x.iter().map(|v| Vec2([cplx(&v[0]), cplx(&v[1])])).collect(),
            y: self.y.iter().map(|v| Covec2([cplx(&v[0]), cplx(&v[1])])).collect(),
        }
    }

    pub fn tangent(&self) -> Option<TangentHP<f64>> {
        self.tangent.as_ref().map(|t| TangentHP {
            xdot: t.xdot.iter().map(|v| Vec2([cplx(&v[0]), cplx(&v[1])])).collect(),
            ydot: t.ydot.iter().map(|v| Covec2([cplx(&v[0]), cplx(&v[1])])).collect(),
        })
    }

    pub fn punctures(&self) -> Option<Vec<C<f64>>> {
        self.punctures.as_ref().map(|p| p.iter().map(cplx).collect())
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Scientific notation with 16 digits after the point.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct SciFormatter(serde_json::ser::PrettyFormatter<'static>);

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// CSV with a header row; `rows` are already formatted.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
}
