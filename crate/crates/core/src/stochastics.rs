//! Zero-drift random tandem walks: step distributions, the discrete harmonic function V,
//! asymptotic constants and numerical diagnostics of the limit theorems.

use std::f64::consts::PI;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::steps::{periodicity, Step};

/// Scalars a step distribution can be built over: exact rationals or floats.
pub trait Scalar: Num + Signed + Clone + PartialOrd + fmt::Debug {
    fn from_int(n: i64) -> Self;
    fn as_f64(&self) -> f64;
    /// Whether a residual counts as zero: exactly for rationals, below 1e-12 for floats.
    /// Sign tests compare with zero: for floats `Signed::is_positive` holds for +0.0.
    fn negligible(&self) -> bool;
}

impl Scalar for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn negligible(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn negligible(&self) -> bool {
        self.abs() < 1e-12
    }
}

fn binom<T: Scalar>(m: i64, k: i64) -> T {
    T::from_int(
        crate::closed_forms::binomial(m, k)
            .to_i64()
            .expect("small binomial"),
    )
}

/// Probabilities `z` of the SE step and `z_r` of each face step of level r.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepDistribution<T> {
    pub z: T,
    pub zr: Vec<T>,
}

impl<T: Scalar> StepDistribution<T> {
    /// Checks nonnegativity, p ≥ 1, z_p > 0 and z + Σ (r+1) z_r = 1.
    pub fn new(z: T, zr: Vec<T>) -> Result<Self> {
        if zr.len() < 2 {
            return Err(Error::Domain("need p >= 1".into()));
        }
        if z < T::zero() || zr.iter().any(|v| *v < T::zero()) {
            return Err(Error::Domain("probabilities must be nonnegative".into()));
        }
        if !zr.last().is_some_and(|v| *v > T::zero()) {
            return Err(Error::Domain("z_p must be positive".into()));
        }
        let d = StepDistribution { z, zr };
        let res = d.normalization_residual();
        if !res.negligible() {
            return Err(Error::Domain(format!(
                "not normalized: z + sum (r+1) z_r - 1 = {res:?}"
            )));
        }
        Ok(d)
    }

    pub fn p(&self) -> usize {
        self.zr.len() - 1
    }

    pub fn normalization_residual(&self) -> T {
        let total = self
            .zr
            .iter()
            .enumerate()
            .fold(self.z.clone(), |acc, (r, v)| {
                acc + v.clone() * T::from_int(r as i64 + 1)
            });
        total - T::one()
    }

    /// E(X) = -E(Y) = z - Σ z_r C(r+1, 2).
    pub fn drift(&self) -> T {
        self.zr
            .iter()
            .enumerate()
            .fold(self.z.clone(), |acc, (r, v)| {
                acc - v.clone() * binom::<T>(r as i64 + 1, 2)
            })
    }

    pub fn is_zero_drift(&self) -> bool {
        self.drift().negligible()
    }

    /// σ² = Σ z_r C(r+2, 3).
    pub fn sigma2(&self) -> T {
        self.zr.iter().enumerate().fold(T::zero(), |acc, (r, v)| {
            acc + v.clone() * binom::<T>(r as i64 + 2, 3)
        })
    }

    /// Every step with positive probability.
    pub fn steps(&self) -> Vec<(Step, T)> {
        let mut out = Vec::new();
        if self.z > T::zero() {
            out.push((Step::SE, self.z.clone()));
        }
        for (r, v) in self.zr.iter().enumerate() {
            if *v > T::zero() {
                let r = r as u32;
                out.extend((0..=r).map(|i| (Step::Face(i, r - i), v.clone())));
            }
        }
        out
    }

    /// Levels with positive probability.
    pub fn levels(&self) -> Vec<u32> {
        (0..self.zr.len())
            .filter(|&r| self.zr[r] > T::zero())
            .map(|r| r as u32)
            .collect()
    }

    /// Periodicity index ι = gcd(r+2) over used levels.
    pub fn iota(&self) -> u64 {
        periodicity(&self.levels()).map(|p| p.iota).unwrap_or(1)
    }

    pub fn to_f64(&self) -> StepDistribution<f64> {
        StepDistribution {
            z: self.z.as_f64(),
            zr: self.zr.iter().map(Scalar::as_f64).collect(),
        }
    }

    fn require_zero_drift(&self) -> Result<()> {
        if self.is_zero_drift() {
            Ok(())
        } else {
            Err(Error::Domain(format!("drift is {:?}, not 0", self.drift())))
        }
    }
}

impl StepDistribution<BigRational> {
    /// The only zero-drift distribution supported on level p alone:
    /// z_p = 2/((p+1)(p+2)), z = p/(p+2).
    pub fn single_level(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Domain("need p >= 1".into()));
        }
        let p = p as i64;
        let mut zr = vec![BigRational::zero(); p as usize + 1];
        zr[p as usize] = BigRational::new(2.into(), ((p + 1) * (p + 2)).into());
        Self::new(BigRational::new(p.into(), (p + 2).into()), zr)
    }

    /// p = 1, z = z_1 = 1/3: the uniform distribution on the three steps of level-1 walks.
    pub fn uniform_p1() -> Self {
        Self::single_level(1).expect("valid")
    }
}

/// First and second moments of one step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moments<T> {
    pub drift: (T, T),
    /// Covariance matrix [[Var X, Cov], [Cov, Var Y]].
    pub covariance: [[T; 2]; 2],
    pub sigma2: T,
}

impl<T: Scalar> Moments<T> {
    /// Correlation E(XY)/√(E(X²)E(Y²)); -1/2 for every zero-drift distribution.
    pub fn correlation(&self) -> f64 {
        let c = &self.covariance;
        c[0][1].as_f64() / (c[0][0].as_f64() * c[1][1].as_f64()).sqrt()
    }
}

/// Drift, covariance and σ². Under zero drift the covariance is asserted to be σ²[[2,-1],[-1,2]].
pub fn drift_and_covariance<T: Scalar>(dist: &StepDistribution<T>) -> Result<Moments<T>> {
    let res = dist.normalization_residual();
    if !res.negligible() {
        return Err(Error::Domain(format!("not normalized: residual {res:?}")));
    }
    let (mut ex, mut ey, mut exx, mut exy, mut eyy) =
        (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for (s, pr) in dist.steps() {
        let (x, y) = s.vector();
        let (x, y) = (T::from_int(x), T::from_int(y));
        ex = ex + pr.clone() * x.clone();
        ey = ey + pr.clone() * y.clone();
        exx = exx + pr.clone() * x.clone() * x.clone();
        exy = exy + pr.clone() * x * y.clone();
        eyy = eyy + pr * y.clone() * y;
    }
    let cxx = exx - ex.clone() * ex.clone();
    let cxy = exy - ex.clone() * ey.clone();
    let cyy = eyy - ey.clone() * ey.clone();
    let sigma2 = dist.sigma2();
    if dist.is_zero_drift() {
        let two = T::from_int(2);
        let ok = (cxx.clone() - two.clone() * sigma2.clone()).negligible()
            && (cyy.clone() - two * sigma2.clone()).negligible()
            && (cxy.clone() + sigma2.clone()).negligible();
        if !ok {
            return Err(Error::Internal(
                "covariance is not sigma^2 [[2,-1],[-1,2]]".into(),
            ));
        }
    }
    Ok(Moments {
        drift: (ex, ey),
        covariance: [[cxx, cxy.clone()], [cxy, cyy]],
        sigma2,
    })
}

/// α, γ and the zero-drift distribution z = α²/γ, z_r = w_r α^{-r}/γ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Normalized {
    pub alpha: f64,
    pub gamma: f64,
    pub dist: StepDistribution<f64>,
}

/// Solves α² = Σ C(r+1,2) w_r α^{-r} by bisection, then γ = Σ C(r+2,2) w_r α^{-r}.
pub fn normalize_weights(w: &[f64]) -> Result<Normalized> {
    if w.len() < 2 {
        return Err(Error::Domain("need weights w_0..w_p with p >= 1".into()));
    }
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Domain(
            "weights must be finite and nonnegative".into(),
        ));
    }
    if w.iter().skip(1).all(|v| *v == 0.0) {
        return Err(Error::Domain(
            "some w_r with r >= 1 must be positive".into(),
        ));
    }
    let w: Vec<f64> = {
        let last = w.iter().rposition(|v| *v > 0.0).unwrap_or(0);
        w[..=last].to_vec()
    };
    let f = |a: f64| {
        a * a
            - w.iter()
                .enumerate()
                .map(|(r, v)| (r * (r + 1) / 2) as f64 * v * a.powi(-(r as i32)))
                .sum::<f64>()
    };
    let k: f64 = w
        .iter()
        .enumerate()
        .map(|(r, v)| (r * (r + 1) / 2) as f64 * v)
        .sum();
    let mut lo = 1e-6;
    while f(lo) > 0.0 {
        lo /= 2.0;
    }
    let mut hi = 1.0f64.max(k.sqrt()) + 1.0;
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let gamma: f64 = w
        .iter()
        .enumerate()
        .map(|(r, v)| ((r + 1) * (r + 2) / 2) as f64 * v * alpha.powi(-(r as i32)))
        .sum();
    let dist = StepDistribution {
        z: alpha * alpha / gamma,
        zr: w
            .iter()
            .enumerate()
            .map(|(r, v)| v * alpha.powi(-(r as i32)) / gamma)
            .collect(),
    };
    if !dist.normalization_residual().negligible() || !dist.is_zero_drift() {
        return Err(Error::Internal(format!("normalization failed for {w:?}")));
    }
    Ok(Normalized { alpha, gamma, dist })
}

/// Λ(u) = Σ_k u^k Σ_{r>k} z_r C(r-k+1, 2).
pub fn lambda<T: Scalar>(dist: &StepDistribution<T>) -> Vec<T> {
    let p = dist.p();
    (0..p)
        .map(|k| {
            (k + 1..=p).fold(T::zero(), |acc, r| {
                acc + dist.zr[r].clone() * binom::<T>((r - k + 1) as i64, 2)
            })
        })
        .collect()
}

/// Coefficients of 1/((1-u)³Λ(u)) up to u^n.
fn f_coeffs<T: Scalar>(dist: &StepDistribution<T>, n: usize) -> Result<Vec<T>> {
    let lam = lambda(dist);
    let cube = [1, -3, 3, -1].map(T::from_int);
    let mut den = vec![T::zero(); lam.len() + 3];
    for (i, c) in cube.iter().enumerate() {
        for (j, l) in lam.iter().enumerate() {
            den[i + j] = den[i + j].clone() + c.clone() * l.clone();
        }
    }
    if den[0].is_zero() {
        return Err(Error::Domain("Lambda(0) = 0".into()));
    }
    let mut f: Vec<T> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut acc = if m == 0 { T::one() } else { T::zero() };
        for k in 1..=m.min(den.len() - 1) {
            acc = acc - den[k].clone() * f[m - k].clone();
        }
        f.push(acc / den[0].clone());
    }
    Ok(f)
}

/// Table of σ·V(a,b) for a ≤ a_max, b ≤ b_max: the coefficients of
/// 2(1-uv)/((1-u)³(1-v)³Λ(u)). Requires zero drift.
pub fn harmonic_table<T: Scalar>(
    dist: &StepDistribution<T>,
    a_max: usize,
    b_max: usize,
) -> Result<Vec<Vec<T>>> {
    dist.require_zero_drift()?;
    let f = f_coeffs(dist, a_max)?;
    let g = |b: usize| T::from_int(((b + 1) * (b + 2) / 2) as i64);
    let two = T::from_int(2);
    Ok((0..=a_max)
        .map(|a| {
            (0..=b_max)
                .map(|b| {
                    let mut v = f[a].clone() * g(b);
                    if a > 0 && b > 0 {
                        v = v - f[a - 1].clone() * g(b - 1);
                    }
                    two.clone() * v
                })
                .collect()
        })
        .collect())
}

/// V(a,b) stored as an exact rational times 1/σ.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicValue {
    pub rational_part: BigRational,
    pub sigma2: BigRational,
}

impl HarmonicValue {
    pub fn to_f64(&self) -> f64 {
        self.rational_part.as_f64() / self.sigma2.as_f64().sqrt()
    }

    /// σ³V(a,b), which is rational.
    pub fn sigma_cubed_v(&self) -> BigRational {
        &self.rational_part * &self.sigma2
    }
}

pub fn harmonic_v(
    dist: &StepDistribution<BigRational>,
    a: usize,
    b: usize,
) -> Result<HarmonicValue> {
    let t = harmonic_table(dist, a, b)?;
    Ok(HarmonicValue {
        rational_part: t[a][b].clone(),
        sigma2: dist.sigma2(),
    })
}

/// Float V(a,b) for a float distribution.
pub fn harmonic_v_f64(dist: &StepDistribution<f64>, a: usize, b: usize) -> Result<f64> {
    let t = harmonic_table(dist, a, b)?;
    Ok(t[a][b] / dist.sigma2().sqrt())
}

/// Largest absolute residual of a harmonicity check, with the number of points examined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual<T> {
    pub max_abs: T,
    pub points: usize,
}

impl<T: Scalar> Residual<T> {
    pub fn is_zero(&self) -> bool {
        self.max_abs.negligible()
    }
}

/// Residual of V(a,b) = zV(a+1,b-1) + Σ z_r Σ_i V(a-i, b+r-i), V = 0 off the quadrant,
/// over 0 ≤ a < a_range, 0 ≤ b < b_range (values of σV, which is equivalent).
pub fn check_harmonicity<T: Scalar>(
    dist: &StepDistribution<T>,
    a_range: usize,
    b_range: usize,
) -> Result<Residual<T>> {
    let p = dist.p();
    let t = harmonic_table(dist, a_range + 1, b_range + p + 1)?;
    let v = |a: i64, b: i64| -> T {
        if a < 0 || b < 0 {
            T::zero()
        } else {
            t[a as usize][b as usize].clone()
        }
    };
    let steps = dist.steps();
    let mut max_abs = T::zero();
    for a in 0..a_range as i64 {
        for b in 0..b_range as i64 {
            let mut rhs = T::zero();
            for (s, pr) in &steps {
                let (dx, dy) = s.vector();
                rhs = rhs + pr.clone() * v(a + dx, b + dy);
            }
            let r = (v(a, b) - rhs).abs();
            if r > max_abs {
                max_abs = r;
            }
        }
    }
    Ok(Residual {
        max_abs,
        points: a_range * b_range,
    })
}

/// V_∞(a,b) = ab(a+b).
pub fn v_infinity(a: i64, b: i64) -> i64 {
    a * b * (a + b)
}

/// V_∞ˢ(a,b) = V_∞(a+1, b+1).
pub fn v_infinity_shifted(a: i64, b: i64) -> i64 {
    v_infinity(a + 1, b + 1)
}

/// Residual of f = E f(· + (X,Y)) on the box [-r, r]², with no killing.
pub fn global_harmonic_residual<T: Scalar>(
    dist: &StepDistribution<T>,
    f: impl Fn(i64, i64) -> i64,
    r: i64,
) -> Residual<T> {
    let steps = dist.steps();
    let mut max_abs = T::zero();
    let mut points = 0;
    for a in -r..=r {
        for b in -r..=r {
            let mut e = T::zero();
            for (s, pr) in &steps {
                let (dx, dy) = s.vector();
                e = e + pr.clone() * T::from_int(f(a + dx, b + dy));
            }
            let res = (T::from_int(f(a, b)) - e).abs();
            if res > max_abs {
                max_abs = res;
            }
            points += 1;
        }
    }
    Residual { max_abs, points }
}

/// Constants of the estimate q_n(a,b;c,d) ~ κ γ^n n^{-4}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticProfile {
    pub iota: u64,
    pub alpha: f64,
    pub gamma: f64,
    pub sigma2: f64,
    pub kappa: f64,
}

/// κ = ι/(4√3πσ²) V(a,b) V(d,c) α^{(d-b)-(c-a)} for face weights w_0..w_p (SE weight 1).
pub fn kappa(w: &[f64], a: usize, b: usize, c: usize, d: usize) -> Result<AsymptoticProfile> {
    let n = normalize_weights(w)?;
    let dist = &n.dist;
    let sigma2 = dist.sigma2();
    let iota = dist.iota();
    let vab = harmonic_v_f64(dist, a, b)?;
    let vdc = harmonic_v_f64(dist, d, c)?;
    let e = (d as i32 - b as i32) - (c as i32 - a as i32);
    let kappa = iota as f64 / (4.0 * 3f64.sqrt() * PI * sigma2) * vab * vdc * n.alpha.powi(e);
    Ok(AsymptoticProfile {
        iota,
        alpha: n.alpha,
        gamma: n.gamma,
        sigma2,
        kappa,
    })
}

/// Face weights for bipolar orientations with inner face degrees in Ω: w_r = 1 iff r+2 ∈ Ω.
pub fn omega_weights(omega: &[u32]) -> Result<Vec<f64>> {
    let max = omega.iter().copied().max().unwrap_or(0);
    if max < 3 || omega.iter().any(|&s| s < 2) {
        return Err(Error::Domain("need degrees >= 2 with max >= 3".into()));
    }
    let mut w = vec![0.0; max as usize - 1];
    for &s in omega {
        w[s as usize - 2] = 1.0;
    }
    Ok(w)
}

/// κ for B_n^{(Ω)}(b,c) through the closed form specialized to a = d = 0:
/// ιγ²/(4√3πα⁴σ⁴) (b+1)(b+2)(c+1)(c+2) α^{-b-c}.
pub fn kappa_bipolar(omega: &[u32], b: usize, c: usize) -> Result<AsymptoticProfile> {
    let w = omega_weights(omega)?;
    let n = normalize_weights(&w)?;
    let sigma2 = n.dist.sigma2();
    let iota = n.dist.iota();
    let (a4, s4) = (n.alpha.powi(4), sigma2 * sigma2);
    let poly = ((b + 1) * (b + 2) * (c + 1) * (c + 2)) as f64;
    let kappa = iota as f64 * n.gamma * n.gamma / (4.0 * 3f64.sqrt() * PI * a4 * s4)
        * poly
        * n.alpha.powi(-((b + c) as i32));
    Ok(AsymptoticProfile {
        iota,
        alpha: n.alpha,
        gamma: n.gamma,
        sigma2,
        kappa,
    })
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(self) -> f64 {
        self.sum + self.c
    }
}

/// Probability mass of the walk killed outside the quadrant, on a dense grid.
struct Mass {
    steps: Vec<((i64, i64), f64)>,
    width: usize,
    height: usize,
    cur: Vec<f64>,
    next: Vec<f64>,
    /// Inclusive bounding box of nonzero cells.
    xmax: usize,
    ymax: usize,
    prune: f64,
}

impl Mass {
    fn new(dist: &StepDistribution<f64>, (a, b): (usize, usize), n: usize, prune: f64) -> Self {
        let p = dist.p();
        let width = a + n + 1;
        let height = b + p * n + 1;
        let mut cur = vec![0.0; width * height];
        cur[a * height + b] = 1.0;
        Mass {
            steps: dist
                .steps()
                .into_iter()
                .map(|(s, pr)| (s.vector(), pr))
                .collect(),
            width,
            height,
            cur,
            next: vec![0.0; width * height],
            xmax: a,
            ymax: b,
            prune,
        }
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        if x < self.width && y < self.height {
            self.cur[x * self.height + y]
        } else {
            0.0
        }
    }

    /// One step; `exit(x, y, mass)` receives every transition leaving the quadrant.
    fn step(&mut self, mut exit: impl FnMut(i64, i64, f64)) {
        let h = self.height;
        let (mut nx, mut ny) = (0, 0);
        for x in 0..=self.xmax {
            for y in 0..=self.ymax {
                let m = self.cur[x * h + y];
                if m == 0.0 {
                    continue;
                }
                self.cur[x * h + y] = 0.0;
                if m < self.prune {
                    continue;
                }
                for &((dx, dy), pr) in &self.steps {
                    let (tx, ty) = (x as i64 + dx, y as i64 + dy);
                    if tx < 0 || ty < 0 {
                        exit(tx, ty, m * pr);
                        continue;
                    }
                    let (tx, ty) = (tx as usize, ty as usize);
                    self.next[tx * h + ty] += m * pr;
                    nx = nx.max(tx);
                    ny = ny.max(ty);
                }
            }
        }
        std::mem::swap(&mut self.cur, &mut self.next);
        self.xmax = nx;
        self.ymax = ny;
    }

    fn total(&self) -> f64 {
        let mut s = Compensated::default();
        for x in 0..=self.xmax {
            for y in 0..=self.ymax {
                s.add(self.cur[x * self.height + y]);
            }
        }
        s.value()
    }
}

/// P(τ^{(a,b)} > n) by float DP.
pub fn survival_probability(dist: &StepDistribution<f64>, a: usize, b: usize, n: usize) -> f64 {
    let mut m = Mass::new(dist, (a, b), n, 0.0);
    for _ in 0..n {
        m.step(|_, _, _| {});
    }
    m.total()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticRow {
    pub n: usize,
    pub survival: f64,
    /// P(τ > n)·4√π·n^{3/2}/V(a,b).
    pub survival_ratio: f64,
    /// P(S_n = (c,d), τ > n); exactly 0 when the congruence fails.
    pub local: f64,
    /// P(S_n = (c,d), τ > n)·4√3πσ²n⁴/(ιV(a,b)V(d,c)); `None` off the congruence class.
    pub local_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitDiagnostics {
    pub rows: Vec<DiagnosticRow>,
}

impl LimitDiagnostics {
    pub fn row(&self, n: usize) -> Option<&DiagnosticRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// The last row whose local ratio is defined.
    pub fn last_local(&self) -> Option<&DiagnosticRow> {
        self.rows.iter().rev().find(|r| r.local_ratio.is_some())
    }
}

/// Ratios of the survival and local probabilities to their predicted asymptotics, n = 1..=n_max.
pub fn limit_diagnostics(
    dist: &StepDistribution<f64>,
    (a, b): (usize, usize),
    (c, d): (usize, usize),
    n_max: usize,
) -> Result<LimitDiagnostics> {
    if !dist.is_zero_drift() {
        return Err(Error::Domain(
            "diagnostics need a zero-drift distribution".into(),
        ));
    }
    let sigma2 = dist.sigma2();
    let iota = dist.iota();
    let vab = harmonic_v_f64(dist, a, b)?;
    let vdc = harmonic_v_f64(dist, d, c)?;
    let per = periodicity(&dist.levels())?;
    let mut m = Mass::new(dist, (a, b), n_max, 0.0);
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        m.step(|_, _, _| {});
        let nf = n as f64;
        let survival = m.total();
        let local = m.at(c, d);
        let reachable = per.reachable(n as u64, (c as i64 - a as i64, d as i64 - b as i64));
        rows.push(DiagnosticRow {
            n,
            survival,
            survival_ratio: survival * 4.0 * PI.sqrt() * nf.powf(1.5) / vab,
            local,
            local_ratio: reachable.then(|| {
                local * 4.0 * 3f64.sqrt() * PI * sigma2 * nf.powi(4) / (iota as f64 * vab * vdc)
            }),
        });
    }
    Ok(LimitDiagnostics { rows })
}

/// Both sides of V_∞ˢ(a,b) - σ³V(a,b) = E[V_∞ˢ(S(τ))].
#[derive(Clone, Debug, PartialEq)]
pub struct ExitIdentity {
    /// V_∞ˢ(a,b) - σ³V(a,b), exact.
    pub lhs: BigRational,
    /// E[V_∞ˢ(S(τ)); τ ≤ N] by float DP.
    pub rhs_estimate: f64,
    /// P(τ > N): mass not yet accounted for.
    pub surviving_mass: f64,
    pub truncation: usize,
}

impl ExitIdentity {
    /// |rhs - lhs| / |lhs|, or |rhs| when lhs = 0.
    pub fn relative_error(&self) -> f64 {
        let l = self.lhs.as_f64();
        if l == 0.0 {
            self.rhs_estimate.abs()
        } else {
            ((self.rhs_estimate - l) / l).abs()
        }
    }
}

pub fn exit_identity(
    dist: &StepDistribution<BigRational>,
    a: usize,
    b: usize,
    n_trunc: usize,
) -> Result<ExitIdentity> {
    let v = harmonic_v(dist, a, b)?;
    let lhs = BigRational::from_int(v_infinity_shifted(a as i64, b as i64)) - v.sigma_cubed_v();
    let fd = dist.to_f64();
    let mut m = Mass::new(&fd, (a, b), n_trunc, 1e-20);
    let mut rhs = Compensated::default();
    for _ in 0..n_trunc {
        m.step(|x, y, mass| rhs.add(mass * v_infinity_shifted(x, y) as f64));
    }
    Ok(ExitIdentity {
        lhs,
        rhs_estimate: rhs.value(),
        surviving_mass: m.total(),
        truncation: n_trunc,
    })
}

/// Limit density of S(n)/(σ√n) conditioned on τ > n:
/// g(x,y) = xy(x+y) exp(-(x²+y²+xy)/3)/√(3π) on the quadrant, 0 elsewhere.
pub fn g_density(x: f64, y: f64) -> f64 {
    if x < 0.0 || y < 0.0 {
        return 0.0;
    }
    x * y * (x + y) * (-(x * x + y * y + x * y) / 3.0).exp() / (3.0 * PI).sqrt()
}

/// max g, attained at (√6/2, √6/2); about 0.267.
pub fn g0() -> f64 {
    let m = 6f64.sqrt() / 2.0;
    g_density(m, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p2() -> StepDistribution<BigRational> {
        StepDistribution::single_level(2).unwrap()
    }

    #[test]
    fn moments() {
        let m = drift_and_covariance(&StepDistribution::uniform_p1()).unwrap();
        assert_eq!(m.drift, (q(0, 1), q(0, 1)));
        assert_eq!(m.sigma2, q(1, 3));
        assert_eq!(m.covariance, [[q(2, 3), q(-1, 3)], [q(-1, 3), q(2, 3)]]);
        assert!((m.correlation() + 0.5).abs() < 1e-15);
        assert_eq!(p2().z, q(1, 2));
        assert_eq!(p2().zr[2], q(1, 6));
        assert_eq!(drift_and_covariance(&p2()).unwrap().sigma2, q(2, 3));
        let biased = StepDistribution::new(q(1, 2), vec![q(0, 1), q(1, 4)]).unwrap();
        assert_eq!(drift_and_covariance(&biased).unwrap().drift.0, q(1, 4));
        assert!(StepDistribution::new(q(1, 2), vec![q(0, 1), q(1, 2)]).is_err());
    }

    #[test]
    fn normalization() {
        let t = normalize_weights(&[0.0, 1.0]).unwrap();
        assert!((t.alpha - 1.0).abs() < 1e-14 && (t.gamma - 3.0).abs() < 1e-13);
        assert!((t.dist.sigma2() - 1.0 / 3.0).abs() < 1e-14);
        let f = normalize_weights(&[0.0, 0.0, 1.0]).unwrap();
        assert!((f.alpha - 3f64.powf(0.25)).abs() < 1e-13);
        assert!((f.gamma - 2.0 * 3f64.sqrt()).abs() < 1e-13);
        assert!((f.dist.sigma2() - 2.0 / 3.0).abs() < 1e-13);
        let g = normalize_weights(&[0.0, 0.0, 5.0]).unwrap();
        assert!(g.dist.is_zero_drift());
        assert!(normalize_weights(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn harmonic_values() {
        let v = harmonic_v(&StepDistribution::uniform_p1(), 0, 0).unwrap();
        assert!((v.to_f64() - 6.0 * 3f64.sqrt()).abs() < 1e-12);
        let v = harmonic_v(&p2(), 0, 0).unwrap();
        assert!((v.to_f64() - 2.0 * 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(v.sigma_cubed_v(), q(8, 3));
        let big = harmonic_v(&p2(), 60, 60).unwrap().sigma_cubed_v().as_f64();
        assert!((big / (61.0 * 61.0 * 122.0) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn g_max() {
        assert!((g0() - 0.267).abs() < 1e-3);
        assert_eq!(g_density(3.0, 0.0), 0.0);
        for &(x, y) in &[(1.0, 1.5), (1.3, 1.2), (2.0, 0.5)] {
            assert!(g_density(x, y) <= g0());
        }
    }
}
