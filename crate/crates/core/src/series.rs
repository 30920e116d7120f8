//! Truncated power series in `t` whose coefficients are Laurent polynomials in two variables,
//! and the generating-function formulas built on them.
//!
//! Every series carries an explicit truncation order; products never read past it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::steps::WeightSpec;

pub type Q = BigRational;

pub(crate) fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Laurent polynomial in two variables with exact rational coefficients.
///
/// Exponent vectors are `[first, second]`. What the two symbols stand for (x and y, x and z,
/// u and W) is up to the caller.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<[i32; 2], Q>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        LaurentPoly::monomial(c, [0, 0])
    }

    pub fn monomial(c: Q, e: [i32; 2]) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(e, c);
        p
    }

    /// `first^k`.
    pub fn x_pow(k: i32) -> Self {
        LaurentPoly::monomial(Q::one(), [k, 0])
    }

    /// `second^k`.
    pub fn y_pow(k: i32) -> Self {
        LaurentPoly::monomial(Q::one(), [0, k])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32; 2], &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: [i32; 2]) -> Q {
        self.terms.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff([0, 0])
    }

    pub fn add_term(&mut self, e: [i32; 2], c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplication by the monomial `first^e[0] second^e[1]`.
    pub fn shift(&self, e: [i32; 2]) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| ([k[0] + e[0], k[1] + e[1]], v.clone()))
                .collect(),
        }
    }

    fn filter(&self, keep: impl Fn(&[i32; 2]) -> bool) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, v)| (*e, v.clone()))
                .collect(),
        }
    }

    /// Terms with a nonnegative first exponent.
    pub fn nonneg_first(&self) -> Self {
        self.filter(|e| e[0] >= 0)
    }

    /// Terms with a nonnegative second exponent.
    pub fn nonneg_second(&self) -> Self {
        self.filter(|e| e[1] >= 0)
    }

    /// Coefficient of `first^k`, as a polynomial in the second variable.
    pub fn first_coeff(&self, k: i32) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[0] == k)
                .map(|(e, v)| ([0, e[1]], v.clone()))
                .collect(),
        }
    }

    /// Coefficient of `second^k`, as a polynomial in the first variable.
    pub fn second_coeff(&self, k: i32) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[1] == k)
                .map(|(e, v)| ([e[0], 0], v.clone()))
                .collect(),
        }
    }

    /// Sets the first variable to 1.
    pub fn first_at_one(&self) -> Self {
        let mut out = LaurentPoly::zero();
        for (e, v) in &self.terms {
            out.add_term([0, e[1]], v.clone());
        }
        out
    }

    /// Partial derivative in the second variable.
    pub fn derivative_second(&self) -> Self {
        let mut out = LaurentPoly::zero();
        for (e, v) in &self.terms {
            out.add_term([e[0], e[1] - 1], v * q(e[1] as i64));
        }
        out
    }

    pub fn as_monomial(&self) -> Option<(&Q, [i32; 2])> {
        if self.terms.len() != 1 {
            return None;
        }
        self.terms.iter().next().map(|(e, v)| (v, *e))
    }

    /// Inverse of a monomial; `None` for anything else.
    pub fn inverse_monomial(&self) -> Option<Self> {
        let (c, e) = self.as_monomial()?;
        Some(LaurentPoly::monomial(c.recip(), [-e[0], -e[1]]))
    }

    /// Smallest and largest exponent of one variable (0 = first, 1 = second).
    pub fn exponent_range(&self, axis: usize) -> Option<(i32, i32)> {
        let lo = self.terms.keys().map(|e| e[axis]).min()?;
        let hi = self.terms.keys().map(|e| e[axis]).max()?;
        Some((lo, hi))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = LaurentPoly::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Human-readable form with the given variable names.
    pub fn fmt_with(&self, names: [&str; 2]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mut mono = Vec::new();
            for (k, name) in names.iter().enumerate() {
                match e[k] {
                    0 => {}
                    1 => mono.push(name.to_string()),
                    m => mono.push(format!("{name}^{m}")),
                }
            }
            let body = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono.join("*")
            } else if (-c).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{c}*{}", mono.join("*"))
            };
            parts.push(body);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(["x", "y"]))
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> AddAssign<&'a LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, v) in &rhs.terms {
            self.add_term(*e, v.clone());
        }
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, -v.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, -v.clone())).collect(),
        }
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut acc: BTreeMap<[i32; 2], Q> = BTreeMap::new();
        for (ea, va) in &self.terms {
            for (eb, vb) in &rhs.terms {
                *acc.entry([ea[0] + eb[0], ea[1] + eb[1]])
                    .or_insert_with(Q::zero) += va * vb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        LaurentPoly { terms: acc }
    }
}

/// Truncation order of series known exactly (finitely many terms).
pub const EXACT: i32 = i32::MAX / 4;

/// Laurent series in `t` truncated at an explicit order.
///
/// `coeffs[k]` is the coefficient of `t^(min + k)`; coefficients past the end of the vector are
/// zero up to `order`, and unknown beyond it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSeries {
    min: i32,
    order: i32,
    coeffs: Vec<LaurentPoly>,
}

impl TSeries {
    pub fn new(min: i32, order: i32, mut coeffs: Vec<LaurentPoly>) -> Self {
        let keep = (order - min + 1).max(0) as usize;
        coeffs.truncate(keep);
        TSeries { min, order, coeffs }
    }

    pub fn zero(order: i32) -> Self {
        TSeries::new(0, order, Vec::new())
    }

    pub fn constant(p: LaurentPoly, order: i32) -> Self {
        TSeries::new(0, order, vec![p])
    }

    /// A finite Laurent polynomial in `t`.
    pub fn exact(min: i32, coeffs: Vec<LaurentPoly>) -> Self {
        TSeries::new(min, EXACT, coeffs)
    }

    /// `c * t^k`, known exactly.
    pub fn monomial(c: LaurentPoly, k: i32) -> Self {
        TSeries::exact(k, vec![c])
    }

    pub fn min_order(&self) -> i32 {
        self.min
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Coefficient of `t^n`. Panics past the truncation order.
    pub fn coeff(&self, n: i32) -> LaurentPoly {
        assert!(
            n <= self.order,
            "coefficient t^{n} read past truncation order {}",
            self.order
        );
        if n < self.min {
            return LaurentPoly::zero();
        }
        self.coeffs
            .get((n - self.min) as usize)
            .cloned()
            .unwrap_or_default()
    }

    /// Lowest power of `t` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|k| self.min + k as i32)
    }

    pub fn truncate(&self, order: i32) -> Self {
        TSeries::new(self.min, order.min(self.order), self.coeffs.clone())
    }

    /// Multiplication by `t^k`.
    pub fn mul_t(&self, k: i32) -> Self {
        let order = if self.order >= EXACT {
            EXACT
        } else {
            self.order + k
        };
        TSeries::new(self.min + k, order, self.coeffs.clone())
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        TSeries::new(self.min, self.order, self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, p: &LaurentPoly) -> Self {
        self.map(|c| c * p)
    }

    /// `[first^>=]` applied coefficientwise.
    pub fn nonneg_first(&self) -> Self {
        self.map(LaurentPoly::nonneg_first)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = TSeries::constant(LaurentPoly::one(), EXACT);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Drops the (necessarily zero) coefficients of negative powers of `t`.
    /// A nonzero one signals an inconsistent formula.
    pub fn require_power_series(&self, what: &str) -> Result<Self> {
        for n in self.min..0 {
            if !self.coeff(n).is_zero() {
                return Err(Error::Internal(format!(
                    "{what}: nonzero coefficient of t^{n}"
                )));
            }
        }
        let start = (-self.min).max(0) as usize;
        let coeffs = self.coeffs.iter().skip(start).cloned().collect();
        Ok(TSeries::new(self.min.max(0), self.order, coeffs))
    }

    /// Constant terms of the coefficients of `t^0..=t^order`.
    pub fn scalars(&self) -> Vec<Q> {
        (0..=self.order)
            .map(|n| self.coeff(n).constant_term())
            .collect()
    }

    /// Checks that every coefficient of `t^n` has first exponents inside `[-bound(n), bound(n)]`.
    pub fn check_first_exponents(&self, what: &str, bound: impl Fn(i32) -> i32) -> Result<()> {
        for (k, c) in self.coeffs.iter().enumerate() {
            let n = self.min + k as i32;
            if let Some((lo, hi)) = c.exponent_range(0) {
                let b = bound(n);
                if lo < -b || hi > b {
                    return Err(Error::Internal(format!(
                        "{what}: exponent range [{lo}, {hi}] at t^{n} exceeds bound {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a TSeries> for &'a TSeries {
    type Output = TSeries;
    fn add(self, rhs: &TSeries) -> TSeries {
        let min = self.min.min(rhs.min);
        let order = self.order.min(rhs.order);
        let top = self.top().max(rhs.top()).min(order);
        let coeffs = (min..=top)
            .map(|n| &self.coeff_or_zero(n) + &rhs.coeff_or_zero(n))
            .collect();
        TSeries::new(min, order, coeffs)
    }
}

impl<'a> Sub<&'a TSeries> for &'a TSeries {
    type Output = TSeries;
    fn sub(self, rhs: &TSeries) -> TSeries {
        self + &(-rhs)
    }
}

impl Neg for &TSeries {
    type Output = TSeries;
    fn neg(self) -> TSeries {
        self.map(|c| -c)
    }
}

impl TSeries {
    fn top(&self) -> i32 {
        self.min + self.coeffs.len() as i32 - 1
    }

    fn coeff_or_zero(&self, n: i32) -> LaurentPoly {
        if n < self.min || n > self.top() {
            LaurentPoly::zero()
        } else {
            self.coeffs[(n - self.min) as usize].clone()
        }
    }
}

impl<'a> Mul<&'a TSeries> for &'a TSeries {
    type Output = TSeries;
    fn mul(self, rhs: &TSeries) -> TSeries {
        let min = self.min + rhs.min;
        let order = self
            .order
            .saturating_add(rhs.min)
            .min(rhs.order.saturating_add(self.min))
            .min(EXACT);
        let top = (self.top() + rhs.top()).min(order);
        let mut coeffs = vec![LaurentPoly::zero(); (top - min + 1).max(0) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let k = i + j;
                if min + k as i32 > top {
                    break;
                }
                if !b.is_zero() {
                    coeffs[k] += &(a * b);
                }
            }
        }
        TSeries::new(min, order, coeffs)
    }
}

fn require_unit_se(spec: &WeightSpec) -> Result<()> {
    if !spec.z_se.is_one() {
        return Err(Error::Domain(
            "the series formulas count SE steps with weight 1".into(),
        ));
    }
    Ok(())
}

/// `c_i = sum_{r >= i} z_r xbar^(r-i)`, so that `sum_r z_r sum_i xbar^(r-i) y^i = sum_i c_i y^i`.
fn level_polys(spec: &WeightSpec, with_x: bool) -> Vec<LaurentPoly> {
    let p = spec.p();
    (0..=p)
        .map(|i| {
            let mut c = LaurentPoly::zero();
            for r in i..=p {
                let e = if with_x { -((r - i) as i32) } else { 0 };
                c.add_term([e, 0], spec.z[r].clone());
            }
            c
        })
        .collect()
}

/// Step polynomial `S(x,y) = x/y + sum_r z_r sum_{i<=r} xbar^(r-i) y^i` (x first, y second).
pub fn step_polynomial(spec: &WeightSpec) -> LaurentPoly {
    let mut s = LaurentPoly::monomial(Q::one(), [1, -1]);
    for (r, zr) in spec.z.iter().enumerate() {
        for i in 0..=r {
            s.add_term([-((r - i) as i32), i as i32], zr.clone());
        }
    }
    s
}

/// Kernel `K = 1 - t S(x,y)`, known exactly.
pub fn kernel(spec: &WeightSpec) -> (LaurentPoly, TSeries) {
    let s = step_polynomial(spec);
    let k = TSeries::exact(0, vec![LaurentPoly::one(), -&s]);
    (s, k)
}

/// Horner evaluation of `sum_i c_i Y^i`.
fn horner(cs: &[LaurentPoly], y: &TSeries) -> TSeries {
    let mut acc = TSeries::zero(EXACT);
    for c in cs.iter().rev() {
        acc = &(&acc * y) + &TSeries::constant(c.clone(), EXACT);
    }
    acc
}

/// Horner evaluation of a polynomial with scalar coefficients.
fn horner_scalar(cs: &[Q], y: &TSeries) -> TSeries {
    let polys: Vec<LaurentPoly> = cs
        .iter()
        .map(|c| LaurentPoly::constant(c.clone()))
        .collect();
    horner(&polys, y)
}

/// The root `Y_1` of `K(x, Y_1) = 0`, to order `t^n`. With `with_x = false`, x is set to 1
/// and the result is `W`.
pub fn y1_series(spec: &WeightSpec, n: i32, with_x: bool) -> Result<TSeries> {
    require_unit_se(spec)?;
    let cs = level_polys(spec, with_x);
    let x = if with_x {
        LaurentPoly::x_pow(1)
    } else {
        LaurentPoly::one()
    };
    let x = TSeries::constant(x, EXACT);
    let mut y = TSeries::zero(n);
    // Each pass fixes one more coefficient.
    for _ in 0..n {
        let g = horner(&cs, &y);
        y = (&x + &(&y * &g)).mul_t(1).truncate(n);
    }
    Ok(y)
}

/// `W = Y_1(1)`, to order `t^n`.
pub fn w_series(spec: &WeightSpec, n: i32) -> Result<TSeries> {
    y1_series(spec, n, false)
}

/// `1 - xbar^2/t + sum_r z_r (r+1) xbar^(r+2)`.
fn boundary_factor(spec: &WeightSpec) -> TSeries {
    let mut c0 = LaurentPoly::one();
    for (r, zr) in spec.z.iter().enumerate() {
        c0.add_term([-(r as i32) - 2, 0], zr * q(r as i64 + 1));
    }
    TSeries::exact(-1, vec![LaurentPoly::monomial(-Q::one(), [-2, 0]), c0])
}

/// `Y^b + Y^(b-1) xbar + ... + xbar^b` for a series `Y`.
fn geometric_mix(y: &TSeries, b: u32) -> TSeries {
    let mut acc = TSeries::zero(EXACT);
    let mut power = TSeries::constant(LaurentPoly::one(), EXACT);
    for k in 0..=b {
        acc = &acc + &power.scale(&LaurentPoly::x_pow(-((b - k) as i32)));
        if k < b {
            power = &power * y;
        }
    }
    acc
}

/// The series inside `[x^>=]` for `Q^(0,b)(x,0)`, to order `t^n`.
fn q0b_integrand(spec: &WeightSpec, b: u32, n: i32) -> Result<TSeries> {
    let y = y1_series(spec, n + 2, true)?;
    let h = y.mul_t(-1).scale(&LaurentPoly::x_pow(-1));
    let mix = geometric_mix(&y, b);
    Ok((&(&h * &mix) * &boundary_factor(spec)).truncate(n))
}

/// `Q^(0,b)(x,0)`: generating function of quadrant walks from `(0,b)` ending on the x-axis,
/// with x marking the final abscissa.
pub fn q0b_x0(spec: &WeightSpec, b: u32, n: i32) -> Result<TSeries> {
    let raw = q0b_integrand(spec, b, n)?;
    let p = spec.p() as i32;
    raw.check_first_exponents("q0b_x0", |k| p * (k + 1).max(0) + b as i32 + 2 + p)?;
    raw.nonneg_first().require_power_series("q0b_x0")
}

/// `P_0, ..., P_d` from the recurrence in `1/t` and `xbar`, each known exactly.
pub fn p_polynomials(spec: &WeightSpec, d: u32) -> Vec<TSeries> {
    let cs = level_polys(spec, true);
    let mut ps: Vec<TSeries> = vec![TSeries::constant(LaurentPoly::one(), EXACT)];
    for k in 0..d as usize {
        let mut next = ps[k].mul_t(-1).scale(&LaurentPoly::x_pow(-1));
        // sum_r z_r sum_i xbar^(r-i+1) P_(k-i) = sum_i xbar c_i P_(k-i)
        for (i, c) in cs.iter().enumerate() {
            if i > k {
                break;
            }
            let term = ps[k - i].scale(&c.shift([-1, 0]));
            next = &next - &term;
        }
        ps.push(next);
    }
    ps
}

/// `[y^d] Q^(0,b)(x,y)`, to order `t^n`.
pub fn q0b_y_slice(spec: &WeightSpec, b: u32, d: u32, n: i32) -> Result<TSeries> {
    let pd = p_polynomials(spec, d).pop().expect("P_0 exists");
    let raw = q0b_integrand(spec, b, n + d as i32)?;
    let prod = (&raw * &pd).truncate(n);
    prod.nonneg_first().require_power_series("q0b_y_slice")
}

/// `1/K(x,z)` expanded in t: `sum_k t^k S(x,z)^k`, to order `t^n`.
fn inverse_kernel(s: &LaurentPoly, n: i32) -> TSeries {
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut power = LaurentPoly::one();
    for _ in 0..=n {
        coeffs.push(power.clone());
        power = &power * s;
    }
    TSeries::new(0, n, coeffs)
}

/// The series inside `-[x^>=][z^0]` of the rational constant-term expression, with x first
/// and z second.
fn constant_term_integrand(spec: &WeightSpec, b: u32, n: i32) -> TSeries {
    let s = step_polynomial(spec);
    let s2 = s.derivative_second();
    // -(z^2 / x) S'_2(x,z) (z^b + ... + xbar^b)
    let mut mix = LaurentPoly::zero();
    for k in 0..=b as i32 {
        mix.add_term([-(b as i32 - k), k], Q::one());
    }
    let g = &(-&s2.shift([-1, 2])) * &mix;
    let inv = inverse_kernel(&s, n + 1);
    (&inv.scale(&g) * &boundary_factor(spec)).truncate(n)
}

/// `Q^(0,b)(x,0)` from the rational constant-term expression, to order `t^n`.
pub fn q0b_constant_term_series(spec: &WeightSpec, b: u32, n: i32) -> Result<TSeries> {
    require_unit_se(spec)?;
    let raw = constant_term_integrand(spec, b, n);
    raw.map(|c| c.second_coeff(0).nonneg_first())
        .require_power_series("q0b_constant_term")
}

/// `[x^c] Q^(0,b)(x,0)` from the constant-term expression: coefficients of `t^0..=t^n`.
pub fn q0b_constant_term(spec: &WeightSpec, b: u32, c: u32, n: i32) -> Result<Vec<Q>> {
    require_unit_se(spec)?;
    let raw = constant_term_integrand(spec, b, n);
    let extracted = raw
        .map(|p| LaurentPoly::constant(p.coeff([c as i32, 0])))
        .require_power_series("q0b_constant_term")?;
    Ok(extracted.scalars())
}

/// `[x^0 z^0]` of `num(x,z) (1 + m xbar^k - xbar^2/t) / (1 - t S(x,z))`, to order `t^n`.
fn literal_constant_term(
    num: &LaurentPoly,
    m: i64,
    k: i32,
    s: &LaurentPoly,
    n: i32,
) -> Result<Vec<Q>> {
    let mut c0 = LaurentPoly::one();
    c0.add_term([-k, 0], q(m));
    let factor = TSeries::exact(-1, vec![LaurentPoly::monomial(-Q::one(), [-2, 0]), c0]);
    let inv = inverse_kernel(s, n + 1);
    let raw = (&inv.scale(num) * &factor).truncate(n);
    Ok(raw
        .map(|p| LaurentPoly::constant(p.constant_term()))
        .require_power_series("constant term")?
        .scalars())
}

/// Oriented triangulations of a digon: `sum_k a(k) t^(3k)`, by the printed constant-term
/// expression `[x^0 z^0] (1 - xbar z^2)(1 + 2 xbar^3 - xbar^2/t) / (1 - t(x zbar + xbar + z))`.
pub fn tri_series(n: i32) -> Result<Vec<Q>> {
    let mut num = LaurentPoly::one();
    num.add_term([-1, 2], -Q::one());
    let mut s = LaurentPoly::monomial(Q::one(), [1, -1]);
    s.add_term([-1, 0], Q::one());
    s.add_term([0, 1], Q::one());
    literal_constant_term(&num, 2, 3, &s, n)
}

/// Quadrangulated digons: `sum_k c(k) t^(2k)` from
/// `[x^0 z^0] (1 - xbar^2 z^2 - 2 xbar z^3)(1 + 3 xbar^4 - xbar^2/t) / (1 - t(x zbar + xbar^2 + xbar z + z^2))`.
pub fn quad_series(n: i32) -> Result<Vec<Q>> {
    let mut num = LaurentPoly::one();
    num.add_term([-2, 2], -Q::one());
    num.add_term([-1, 3], q(-2));
    let mut s = LaurentPoly::monomial(Q::one(), [1, -1]);
    s.add_term([-2, 0], Q::one());
    s.add_term([-1, 1], Q::one());
    s.add_term([0, 2], Q::one());
    literal_constant_term(&num, 3, 4, &s, n)
}

/// Excursion series `Q^(0,0)(0,0)` when only level p is used: the general constant-term
/// expression at b = c = 0.
pub fn q0000(p: usize, n: i32) -> Result<Vec<Q>> {
    q0b_constant_term(&WeightSpec::single_level(p), 0, 0, n)
}

/// `A_0, ..., A_a` as polynomials in W (coefficient lists, constant term first).
pub fn a_polynomials(spec: &WeightSpec, a: u32) -> Vec<Vec<Q>> {
    let p = spec.p();
    // D = u W sum_{i,k>=0} u^i W^k sum_{r>i+k} z_r, with u first and W second.
    let mut d = LaurentPoly::zero();
    for i in 0..p {
        for k in 0..p - i {
            let tail: Q = spec.z[i + k + 1..].iter().fold(Q::zero(), |acc, v| acc + v);
            d.add_term([i as i32 + 1, k as i32 + 1], tail);
        }
    }
    // [u^i] 1/(1 - D) only needs D^m for m <= i, since D is divisible by u.
    let mut total = LaurentPoly::one();
    let mut power = LaurentPoly::one();
    for _ in 0..a {
        power = (&power * &d).filter(|e| e[0] <= a as i32);
        total += &power;
    }
    (0..=a as i32)
        .map(|i| {
            let slice = total.first_coeff(i);
            let deg = slice.exponent_range(1).map_or(0, |r| r.1.max(0) as usize);
            (0..=deg).map(|k| slice.coeff([0, k as i32])).collect()
        })
        .collect()
}

/// `Q^(a,b)(1,1) = (W/t) (A_0 + ... + A_a)(1 + W + ... + W^b)`, to order `t^n`.
pub fn a_i_and_q11(spec: &WeightSpec, a: u32, b: u32, n: i32) -> Result<TSeries> {
    let w = w_series(spec, n + 1)?;
    let polys = a_polynomials(spec, a);
    let len = polys.iter().map(Vec::len).max().unwrap_or(1);
    let mut sum_a = vec![Q::zero(); len];
    for poly in &polys {
        for (k, c) in poly.iter().enumerate() {
            sum_a[k] += c;
        }
    }
    let a_part = horner_scalar(&sum_a, &w);
    let b_part = horner_scalar(&vec![Q::one(); b as usize + 1], &w);
    Ok((&(&w.mul_t(-1) * &a_part) * &b_part).truncate(n))
}

/// Half-plane walks from `(0,b)` to the line `y = a` that touch the x-axis: `(W/t) A_a W^b`.
pub fn halfplane_gf(spec: &WeightSpec, a: u32, b: u32, n: i32) -> Result<TSeries> {
    let w = w_series(spec, n + 1)?;
    let aa = a_polynomials(spec, a).pop().expect("A_a exists");
    let a_part = horner_scalar(&aa, &w);
    Ok((&(&w.mul_t(-1) * &a_part) * &w.pow(b)).truncate(n))
}

/// Step weights `w_{-1}, w_0, ..., w_p` of a one-dimensional walk, as Laurent polynomials in
/// the first variable (the second is reserved for the height).
#[derive(Clone, Debug)]
pub struct OneDWeights {
    pub w: Vec<LaurentPoly>,
}

impl OneDWeights {
    pub fn from_ints(w: &[i64]) -> Self {
        OneDWeights {
            w: w.iter().map(|&v| LaurentPoly::constant(q(v))).collect(),
        }
    }

    /// `w_{-1} = x`, `w_s = sum_{r>=s} xbar^(r-s) z_r`: vertical projection of tandem walks
    /// with x marking the abscissa.
    pub fn tandem(spec: &WeightSpec) -> Self {
        let mut w = vec![LaurentPoly::x_pow(1)];
        w.extend(level_polys(spec, true));
        OneDWeights { w }
    }

    fn down(&self) -> &LaurentPoly {
        &self.w[0]
    }

    /// Weight of an up-step of size `s >= 0` (zero past the end).
    fn up(&self, s: usize) -> LaurentPoly {
        self.w.get(s + 1).cloned().unwrap_or_default()
    }

    fn max_up(&self) -> usize {
        self.w.len() - 2
    }

    /// `S(y) = sum_i w_i y^i`.
    fn step_poly(&self) -> LaurentPoly {
        let mut s = LaurentPoly::zero();
        for (k, c) in self.w.iter().enumerate() {
            s += &c.shift([0, k as i32 - 1]);
        }
        s
    }
}

/// `Y = L_1`: the unique series with `Y = t sum_i w_i Y^(i+1)`.
pub fn oned_y(w: &OneDWeights, n: i32) -> TSeries {
    let mut y = TSeries::zero(n);
    for _ in 0..n {
        let g = horner(&w.w, &y);
        y = g.mul_t(1).truncate(n);
    }
    y
}

/// `H_a` by the kernel-method expression.
pub fn oned_h_formula(w: &OneDWeights, a: u32, n: i32) -> Result<TSeries> {
    let inv = w
        .down()
        .inverse_monomial()
        .ok_or_else(|| Error::Domain("w_{-1} must be a monomial".into()))?;
    let y = oned_y(w, n + 1);
    // beta_k = (Y / w_{-1}) sum_j w_{j+k+1} Y^j, so the series is [u^a] 1/(1 - sum_k u^(k+1) beta_k).
    let y_scaled = y.scale(&inv);
    let betas: Vec<TSeries> = (0..a as usize)
        .map(|k| {
            let cs: Vec<LaurentPoly> = (0..=w.max_up()).map(|j| w.up(j + k + 1)).collect();
            &y_scaled * &horner(&cs, &y)
        })
        .collect();
    let mut c = vec![TSeries::constant(LaurentPoly::one(), EXACT)];
    for m in 1..=a as usize {
        let mut acc = TSeries::zero(EXACT);
        for k in 0..m {
            acc = &acc + &(&betas[k] * &c[m - k - 1]);
        }
        c.push(acc.truncate(n + 1));
    }
    let h0 = y_scaled.mul_t(-1);
    Ok((&h0 * &c[a as usize]).truncate(n))
}

/// `-t [y^0] y^(1+k) S'(y) / K(y)`, which should equal `Y^k`.
pub fn oned_l_constant_term(w: &OneDWeights, k: u32, n: i32) -> TSeries {
    let s = w.step_poly();
    let g = -&s.derivative_second().shift([0, 1 + k as i32]);
    let inv = inverse_kernel(&s, n);
    inv.scale(&g)
        .mul_t(1)
        .truncate(n)
        .map(|c| c.second_coeff(0))
}

/// One-dimensional walk counts by DP. Returns, for each length `0..=n`, the weighted number of
/// walks from height `from` to height `to` that stay at height `>= floor`; with `strict_until_end`,
/// height `floor` may be visited only at the last step.
pub fn oned_dp(
    w: &OneDWeights,
    from: i64,
    to: i64,
    floor: i64,
    strict_until_end: bool,
    n: usize,
) -> Vec<LaurentPoly> {
    let mut frontier: BTreeMap<i64, LaurentPoly> = BTreeMap::from([(from, LaurentPoly::one())]);
    let mut out = Vec::with_capacity(n + 1);
    for step in 0..=n {
        out.push(frontier.get(&to).cloned().unwrap_or_default());
        if step == n {
            break;
        }
        let mut next: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (&h, val) in &frontier {
            if strict_until_end && h == floor {
                continue;
            }
            for (k, wk) in w.w.iter().enumerate() {
                if wk.is_zero() {
                    continue;
                }
                let h2 = h + k as i64 - 1;
                if h2 < floor {
                    continue;
                }
                *next.entry(h2).or_default() += &(val * wk);
            }
        }
        frontier = next;
    }
    out
}

/// Outcome of one coefficientwise identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub mismatches: usize,
}

fn compare(name: String, lhs: &TSeries, rhs: &[LaurentPoly]) -> IdentityCheck {
    let mismatches = rhs
        .iter()
        .enumerate()
        .filter(|(k, r)| lhs.coeff(*k as i32) != **r)
        .count();
    IdentityCheck { name, mismatches }
}

/// Checks the kernel-method identity for `H_a`, `D_k = Y^(k+1)/(t w_{-1})`, and
/// `L_k = Y^k = -t [y^0] y^(1+k) S'(y)/K(y)` against the DP, coefficientwise to `t^n`.
pub fn oned_identities(w: &OneDWeights, n: i32, max_index: u32) -> Result<Vec<IdentityCheck>> {
    if n > 20 {
        return Err(Error::Domain(
            "one-dimensional identities are checked up to order 20".into(),
        ));
    }
    if w.w.len() < 2 {
        return Err(Error::Domain("weights must list w_{-1} and w_0".into()));
    }
    let inv = w
        .down()
        .inverse_monomial()
        .ok_or_else(|| Error::Domain("w_{-1} must be a monomial".into()))?;
    let nn = n as usize;
    let y = oned_y(w, n + 1);
    let mut out = Vec::new();
    for a in 0..=max_index {
        let dp = oned_dp(w, 0, a as i64, 0, false, nn);
        out.push(compare(format!("H_{a}"), &oned_h_formula(w, a, n)?, &dp));
    }
    for k in 0..=max_index {
        let dk = y.pow(k + 1).scale(&inv).mul_t(-1).truncate(n);
        let dp = oned_dp(w, 0, -(k as i64), -(k as i64), false, nn);
        out.push(compare(format!("D_{k}"), &dk, &dp));
    }
    for k in 1..=max_index.max(1) {
        let yk = y.pow(k).truncate(n);
        let dp = oned_dp(w, 0, -(k as i64), -(k as i64), true, nn);
        out.push(compare(format!("L_{k}=Y^{k}"), &yk, &dp));
        let ct = oned_l_constant_term(w, k, n);
        let ykv: Vec<LaurentPoly> = (0..=n).map(|m| yk.coeff(m)).collect();
        out.push(compare(format!("L_{k} constant term"), &ct, &ykv));
    }
    Ok(out)
}

/// Power series inverse of `p` (with `p[0] != 0`) to order `m`.
pub(crate) fn series_inverse(p: &[Q], m: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); m + 1];
    let c0 = p[0].recip();
    out[0] = c0.clone();
    for k in 1..=m {
        let mut s = Q::zero();
        for j in 1..=k.min(p.len() - 1) {
            s += &p[j] * &out[k - j];
        }
        out[k] = -s * &c0;
    }
    out
}

pub(crate) fn series_mul(a: &[Q], b: &[Q], m: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); m + 1];
    for (i, x) in a.iter().enumerate().take(m + 1) {
        for (j, y) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Lambda(u) = sum_{k<p} u^k sum_{r>k} z_r binom(r-k+1, 2)`.
pub fn lambda_poly(zr: &[Q]) -> Vec<Q> {
    let p = zr.len() - 1;
    (0..p.max(1))
        .map(|k| {
            (k + 1..=p).fold(Q::zero(), |acc, r| {
                let m = (r - k + 1) as i64;
                acc + &zr[r] * q(m * (m - 1) / 2)
            })
        })
        .collect()
}

/// Checks that `(z, z_0..z_p)` is a probability distribution with zero drift.
pub fn check_zero_drift(z: &Q, zr: &[Q]) -> Result<()> {
    if z.is_negative() || zr.iter().any(Signed::is_negative) {
        return Err(Error::Domain("weights must be nonnegative".into()));
    }
    let total = zr
        .iter()
        .enumerate()
        .fold(z.clone(), |acc, (r, v)| acc + v * q(r as i64 + 1));
    if !total.is_one() {
        return Err(Error::Domain(format!("weights sum to {total}, not 1")));
    }
    let drift = zr.iter().enumerate().fold(z.clone(), |acc, (r, v)| {
        acc - v * q((r * (r + 1) / 2) as i64)
    });
    if !drift.is_zero() {
        return Err(Error::Domain(format!("drift is {drift}, not 0")));
    }
    Ok(())
}

/// Residual `u V(u,0) - (2/sigma)/(I_0(u) - I_0(1))`, divided by `2/sigma`, to order `u^m`.
/// Both sides are power series in u; a correct identity gives all zeros.
pub fn invariant_identity(z: &Q, zr: &[Q], m: usize) -> Result<Vec<Q>> {
    check_zero_drift(z, zr)?;
    if z.is_zero() {
        return Err(Error::Domain("the invariant needs z > 0".into()));
    }
    // Left: u / ((1-u)^3 Lambda(u)).
    let cube = [q(1), q(-3), q(3), q(-1)];
    let denom = series_mul(&cube, &lambda_poly(zr), m + 4);
    let mut lhs = vec![Q::zero()];
    lhs.extend(series_inverse(&denom, m));
    // Right: 1/(I_0(u) - I_0(1)) = u / J(u), with J(u) = u (I_0(u) - I_0(1)).
    let sum_z: Q = zr.iter().fold(Q::zero(), |acc, v| acc + v);
    let mut j = vec![Q::zero(); zr.len() + 2];
    j[0] += z;
    j[1] -= q(1) + z - &sum_z;
    j[2] += q(1);
    for (r, v) in zr.iter().enumerate() {
        j[r + 2] -= v;
    }
    let mut rhs = vec![Q::zero()];
    rhs.extend(series_inverse(&j, m));
    Ok((0..=m).map(|k| &lhs[k] - &rhs[k]).collect())
}
