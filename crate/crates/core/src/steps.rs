//! Tandem steps, walks, boundary statistics and periodicity.

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A tandem step: `SE` moves by (1,-1), `Face(i, j)` by (-i, j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    SE,
    Face(u32, u32),
}

impl Step {
    pub fn vector(self) -> (i64, i64) {
        match self {
            Step::SE => (1, -1),
            Step::Face(i, j) => (-(i as i64), j as i64),
        }
    }

    /// Level i+j of a face step, `None` for SE.
    pub fn level(self) -> Option<u32> {
        match self {
            Step::SE => None,
            Step::Face(i, j) => Some(i + j),
        }
    }

    /// Every step whose weight is nonzero under `spec`, SE first.
    pub fn alphabet(spec: &WeightSpec) -> Vec<Step> {
        let mut out = Vec::new();
        if !spec.z_se.is_zero() {
            out.push(Step::SE);
        }
        for (r, zr) in spec.z.iter().enumerate() {
            if zr.is_zero() {
                continue;
            }
            let r = r as u32;
            for i in 0..=r {
                out.push(Step::Face(i, r - i));
            }
        }
        out
    }
}

pub fn step_vector(s: Step) -> (i64, i64) {
    s.vector()
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::SE => write!(f, "SE"),
            Step::Face(i, j) => write!(f, "F({i},{j})"),
        }
    }
}

impl Serialize for Step {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Step::SE => {
                let mut seq = serializer.serialize_seq(Some(1))?;
                seq.serialize_element("SE")?;
                seq.end()
            }
            Step::Face(i, j) => {
                let mut seq = serializer.serialize_seq(Some(3))?;
                seq.serialize_element("F")?;
                seq.serialize_element(&i)?;
                seq.serialize_element(&j)?;
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct StepVisitor;
        impl<'de> Visitor<'de> for StepVisitor {
            type Value = Step;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(r#"["SE"] or ["F", i, j]"#)
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Step, A::Error> {
                let tag: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                match tag.as_str() {
                    "SE" => {
                        if seq.next_element::<de::IgnoredAny>()?.is_some() {
                            return Err(de::Error::custom("SE takes no arguments"));
                        }
                        Ok(Step::SE)
                    }
                    "F" => {
                        let i: u32 = seq
                            .next_element()?
                            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                        let j: u32 = seq
                            .next_element()?
                            .ok_or_else(|| de::Error::invalid_length(2, &self))?;
                        if seq.next_element::<de::IgnoredAny>()?.is_some() {
                            return Err(de::Error::custom("F takes exactly two arguments"));
                        }
                        Ok(Step::Face(i, j))
                    }
                    other => Err(de::Error::custom(format!("unknown step tag {other:?}"))),
                }
            }
        }
        deserializer.deserialize_seq(StepVisitor)
    }
}

/// Counting weights: SE steps get `z_se`, face steps of level r get `z[r]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpec {
    pub z_se: BigRational,
    pub z: Vec<BigRational>,
}

impl WeightSpec {
    pub fn new(z: Vec<BigRational>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::Domain("weight vector must list z_0..z_p".into()));
        }
        Ok(WeightSpec {
            z_se: BigRational::one(),
            z,
        })
    }

    pub fn from_ints(z: &[i64]) -> Self {
        WeightSpec::new(
            z.iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect(),
        )
        .expect("nonempty weight vector")
    }

    /// All levels 0..=p with weight 1.
    pub fn all_ones(p: usize) -> Self {
        WeightSpec::from_ints(&vec![1; p + 1])
    }

    /// Only level p, with weight 1.
    pub fn single_level(p: usize) -> Self {
        let mut z = vec![0; p + 1];
        z[p] = 1;
        WeightSpec::from_ints(&z)
    }

    pub fn p(&self) -> usize {
        self.z.len() - 1
    }

    pub fn weight(&self, s: Step) -> BigRational {
        match s {
            Step::SE => self.z_se.clone(),
            Step::Face(i, j) => self
                .z
                .get((i + j) as usize)
                .cloned()
                .unwrap_or_else(BigRational::zero),
        }
    }

    /// Levels with nonzero weight.
    pub fn levels(&self) -> Vec<u32> {
        self.z
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(r, _)| r as u32)
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.z_se.is_negative() && self.z.iter().all(|v| !v.is_negative())
    }
}

/// A non-embedded walk.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TandemWalk {
    pub steps: Vec<Step>,
}

impl TandemWalk {
    pub fn new(steps: Vec<Step>) -> Self {
        TandemWalk { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Points visited from `start`, including `start` itself.
    pub fn trajectory(&self, start: (i64, i64)) -> Vec<(i64, i64)> {
        let mut pts = Vec::with_capacity(self.steps.len() + 1);
        let (mut x, mut y) = start;
        pts.push((x, y));
        for s in &self.steps {
            let (dx, dy) = s.vector();
            x += dx;
            y += dy;
            pts.push((x, y));
        }
        pts
    }

    pub fn displacement(&self) -> (i64, i64) {
        self.steps.iter().fold((0, 0), |(x, y), s| {
            let (dx, dy) = s.vector();
            (x + dx, y + dy)
        })
    }

    pub fn se_count(&self) -> usize {
        self.steps.iter().filter(|s| **s == Step::SE).count()
    }

    /// Number of face steps per level, indexed 0..=max level.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for s in &self.steps {
            if let Some(r) = s.level() {
                let r = r as usize;
                if counts.len() <= r {
                    counts.resize(r + 1, 0);
                }
                counts[r] += 1;
            }
        }
        counts
    }

    pub fn weight(&self, spec: &WeightSpec) -> BigRational {
        self.steps
            .iter()
            .fold(BigRational::one(), |acc, s| acc * spec.weight(*s))
    }

    /// SVG drawing of the walk embedded at `start`: a unit grid, the axes, and one polyline.
    pub fn to_svg(&self, start: (i64, i64)) -> String {
        const UNIT: i64 = 20;
        let pts = self.trajectory(start);
        let x_max = pts.iter().map(|p| p.0).max().unwrap_or(0).max(0) + 1;
        let y_max = pts.iter().map(|p| p.1).max().unwrap_or(0).max(0) + 1;
        let x_min = pts.iter().map(|p| p.0).min().unwrap_or(0).min(0) - 1;
        let y_min = pts.iter().map(|p| p.1).min().unwrap_or(0).min(0) - 1;
        // SVG y grows downward.
        let px = |x: i64| (x - x_min) * UNIT;
        let py = |y: i64| (y_max - y) * UNIT;
        let (w, h) = (px(x_max), py(y_min));
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
        );
        for x in x_min..=x_max {
            out.push_str(&format!(
                "  <line x1=\"{0}\" y1=\"0\" x2=\"{0}\" y2=\"{h}\" stroke=\"#ddd\"/>\n",
                px(x)
            ));
        }
        for y in y_min..=y_max {
            out.push_str(&format!(
                "  <line x1=\"0\" y1=\"{0}\" x2=\"{w}\" y2=\"{0}\" stroke=\"#ddd\"/>\n",
                py(y)
            ));
        }
        out.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"0\" x2=\"{0}\" y2=\"{h}\" stroke=\"#888\"/>\n",
            px(0)
        ));
        out.push_str(&format!(
            "  <line x1=\"0\" y1=\"{0}\" x2=\"{w}\" y2=\"{0}\" stroke=\"#888\"/>\n",
            py(0)
        ));
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", px(x), py(y)))
            .collect();
        out.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#c03\" stroke-width=\"2\"/>\n",
            path.join(" ")
        ));
        let (sx, sy) = pts[0];
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#c03\"/>\n",
            px(sx),
            py(sy)
        ));
        out.push_str("</svg>\n");
        out
    }
}

impl fmt::Display for TandemWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, s) in self.steps.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// The embedding-free statistics of a walk.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct WalkBoundaryStats {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl WalkBoundaryStats {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        WalkBoundaryStats { a, b, c, d }
    }
}

pub fn walk_stats(w: &TandemWalk) -> WalkBoundaryStats {
    let pts = w.trajectory((0, 0));
    let xmin = pts.iter().map(|p| p.0).min().unwrap_or(0);
    let ymin = pts.iter().map(|p| p.1).min().unwrap_or(0);
    let (xe, ye) = *pts.last().unwrap_or(&(0, 0));
    WalkBoundaryStats {
        a: (-xmin) as u64,
        b: (-ymin) as u64,
        c: (xe - xmin) as u64,
        d: (ye - ymin) as u64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Quadrant,
    UpperHalfplane,
    None,
}

impl Region {
    pub fn contains(self, (x, y): (i64, i64)) -> bool {
        match self {
            Region::Quadrant => x >= 0 && y >= 0,
            Region::UpperHalfplane => y >= 0,
            Region::None => true,
        }
    }
}

impl std::str::FromStr for Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadrant" => Ok(Region::Quadrant),
            "upper_halfplane" | "halfplane" | "upper-halfplane" => Ok(Region::UpperHalfplane),
            "none" | "plane" => Ok(Region::None),
            _ => Err(Error::Usage(format!("unknown region {s:?}"))),
        }
    }
}

pub fn is_confined(w: &TandemWalk, start: (i64, i64), region: Region) -> bool {
    w.trajectory(start).into_iter().all(|p| region.contains(p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lattice {
    Full,
    EvenSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Periodicity {
    pub iota: u64,
    pub period: u64,
    pub lattice: Lattice,
}

impl Periodicity {
    /// Congruence test i - j ≡ 2n (mod ι). Necessary for reachability; sufficient only for large n.
    pub fn reachable(&self, n: u64, (i, j): (i64, i64)) -> bool {
        let m = self.iota as i64;
        (i - j - 2 * n as i64).rem_euclid(m) == 0
    }
}

pub fn periodicity(levels: &[u32]) -> Result<Periodicity> {
    if levels.is_empty() {
        return Err(Error::Domain("level set is empty".into()));
    }
    if levels.iter().all(|&r| r == 0) {
        return Err(Error::Domain(
            "level set {0} admits no nontrivial walks".into(),
        ));
    }
    let iota = levels.iter().fold(0u64, |g, &r| g.gcd(&(r as u64 + 2)));
    let (period, lattice) = if iota % 2 == 1 {
        (iota, Lattice::Full)
    } else {
        (iota / 2, Lattice::EvenSum)
    };
    Ok(Periodicity {
        iota,
        period,
        lattice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors() {
        assert_eq!(step_vector(Step::SE), (1, -1));
        assert_eq!(step_vector(Step::Face(0, 0)), (0, 0));
        assert_eq!(step_vector(Step::Face(2, 3)), (-2, 3));
    }

    #[test]
    fn stats_small() {
        assert_eq!(
            walk_stats(&TandemWalk::default()),
            WalkBoundaryStats::default()
        );
        let w = TandemWalk::new(vec![Step::Face(0, 1)]);
        assert_eq!(walk_stats(&w), WalkBoundaryStats::new(0, 0, 0, 1));
    }

    #[test]
    fn confinement() {
        let se = TandemWalk::new(vec![Step::SE]);
        assert!(!is_confined(&se, (0, 0), Region::Quadrant));
        assert!(!is_confined(&se, (0, 0), Region::UpperHalfplane));
        assert!(is_confined(&se, (0, 1), Region::UpperHalfplane));
        let w = TandemWalk::new(vec![Step::Face(0, 1), Step::SE]);
        assert!(is_confined(&w, (0, 0), Region::Quadrant));
    }

    #[test]
    fn periods() {
        let p = periodicity(&[1]).unwrap();
        assert_eq!((p.iota, p.period, p.lattice), (3, 3, Lattice::Full));
        let p = periodicity(&[2]).unwrap();
        assert_eq!((p.iota, p.period, p.lattice), (4, 2, Lattice::EvenSum));
        let p = periodicity(&[0, 1]).unwrap();
        assert_eq!((p.iota, p.period, p.lattice), (1, 1, Lattice::Full));
        assert!(periodicity(&[]).is_err());
        assert!(periodicity(&[0]).is_err());
    }

    #[test]
    fn step_json() {
        let w = TandemWalk::new(vec![Step::SE, Step::Face(2, 1)]);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"steps":[["SE"],["F",2,1]]}"#);
        let back: TandemWalk = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<TandemWalk>(r#"{"steps":[["X"]]}"#).is_err());
    }
}
