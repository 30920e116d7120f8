//! Brute-force dynamic programming counts of confined walks.
//!
//! Everything else in the crate is checked against these tables, so the code here stays
//! deliberately plain: a frontier of lattice points, one step at a time, exact arithmetic.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bipolar::Signature;
use crate::error::{Error, Result};
use crate::steps::{Region, Step, TandemWalk, WeightSpec};

/// Largest length accepted by the walk enumerator.
pub const EXHAUSTIVE_MAX_LEN: usize = 10;
/// Largest length accepted by refined (per-level) counting.
pub const REFINED_MAX_LEN: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Point(i64, i64),
    Any,
}

#[derive(Clone, Debug)]
pub struct CountQuery {
    pub spec: WeightSpec,
    pub start: (i64, i64),
    pub end: Endpoint,
    pub n: usize,
    pub region: Region,
    /// Keep only walks with exactly `refine[r]` face steps of level r.
    pub refine: Option<Vec<usize>>,
}

impl CountQuery {
    pub fn new(
        spec: WeightSpec,
        start: (i64, i64),
        end: Endpoint,
        n: usize,
        region: Region,
    ) -> Self {
        CountQuery {
            spec,
            start,
            end,
            n,
            region,
            refine: None,
        }
    }
}

struct Bounds {
    dx: (i64, i64),
    dy: (i64, i64),
}

impl Bounds {
    fn of(steps: &[Step]) -> Self {
        let mut b = Bounds {
            dx: (0, 0),
            dy: (0, 0),
        };
        for (k, s) in steps.iter().enumerate() {
            let (x, y) = s.vector();
            if k == 0 {
                b = Bounds {
                    dx: (x, x),
                    dy: (y, y),
                };
            }
            b.dx = (b.dx.0.min(x), b.dx.1.max(x));
            b.dy = (b.dy.0.min(y), b.dy.1.max(y));
        }
        b
    }

    /// Whether `to` is still reachable from `from` in `m` steps, ignoring the region.
    fn can_reach(&self, from: (i64, i64), to: (i64, i64), m: i64) -> bool {
        let (ex, ey) = (to.0 - from.0, to.1 - from.1);
        m * self.dx.0 <= ex && ex <= m * self.dx.1 && m * self.dy.0 <= ey && ey <= m * self.dy.1
    }
}

/// Generic frontier DP: `weights[k]` is the weight of `steps[k]`.
fn frontier_dp<T: DpRing>(
    steps: &[Step],
    weights: &[T],
    start: (i64, i64),
    end: Endpoint,
    n: usize,
    region: Region,
) -> T {
    if !region.contains(start) {
        return T::zero();
    }
    let bounds = Bounds::of(steps);
    let mut frontier: HashMap<(i64, i64), T> = HashMap::from([(start, T::unit())]);
    for k in 0..n {
        let remaining = (n - k - 1) as i64;
        let mut next: HashMap<(i64, i64), T> = HashMap::with_capacity(frontier.len() * 2);
        // Sorted iteration keeps floating-point sums reproducible.
        let mut keys: Vec<_> = frontier.keys().copied().collect();
        keys.sort_unstable();
        for p in keys {
            let val = &frontier[&p];
            for (s, w) in steps.iter().zip(weights) {
                let (dx, dy) = s.vector();
                let q = (p.0 + dx, p.1 + dy);
                if !region.contains(q) {
                    continue;
                }
                if let Endpoint::Point(cx, cy) = end {
                    if !bounds.can_reach(q, (cx, cy), remaining) {
                        continue;
                    }
                }
                let contrib = val.clone() * w;
                match next.get_mut(&q) {
                    Some(slot) => *slot = std::mem::replace(slot, T::zero()) + &contrib,
                    None => {
                        next.insert(q, contrib);
                    }
                }
            }
        }
        frontier = next;
    }
    match end {
        Endpoint::Point(cx, cy) => frontier.remove(&(cx, cy)).unwrap_or_else(T::zero),
        Endpoint::Any => {
            let mut keys: Vec<_> = frontier.keys().copied().collect();
            keys.sort_unstable();
            keys.iter().fold(T::zero(), |acc, p| acc + &frontier[p])
        }
    }
}

/// Coefficient rings the DP runs over.
pub trait DpRing:
    Clone + Zero + for<'a> Add<&'a Self, Output = Self> + for<'a> Mul<&'a Self, Output = Self>
{
    fn unit() -> Self;
}

impl DpRing for BigRational {
    fn unit() -> Self {
        BigRational::one()
    }
}

impl DpRing for BigInt {
    fn unit() -> Self {
        BigInt::one()
    }
}

impl DpRing for f64 {
    fn unit() -> Self {
        1.0
    }
}

impl DpRing for Monomials {
    fn unit() -> Self {
        Monomials(BTreeMap::from([(Vec::new(), BigInt::one())]))
    }
}

/// Weighted count of confined walks.
pub fn count_walks(q: &CountQuery) -> BigRational {
    if let Some(target) = &q.refine {
        let table = count_refined_unchecked(&q.spec, q.start, q.end, q.n, q.region);
        let mut key = target.clone();
        while key.last() == Some(&0) {
            key.pop();
        }
        let Some(c) = table.get(&key) else {
            return BigRational::zero();
        };
        // Weight of the selected monomial; the SE count is fixed by length and level count.
        let faces: usize = target.iter().sum();
        if faces > q.n {
            return BigRational::zero();
        }
        let mut w = BigRational::from_integer(c.clone());
        for _ in 0..q.n - faces {
            w *= &q.spec.z_se;
        }
        for (r, &m) in target.iter().enumerate() {
            for _ in 0..m {
                w *= q.spec.z.get(r).cloned().unwrap_or_else(BigRational::zero);
            }
        }
        return w;
    }
    let steps = Step::alphabet(&q.spec);
    let weights: Vec<BigRational> = steps.iter().map(|s| q.spec.weight(*s)).collect();
    if weights.iter().all(|w| w.is_integer()) {
        let iw: Vec<BigInt> = weights.iter().map(|w| w.to_integer()).collect();
        return BigRational::from_integer(frontier_dp(&steps, &iw, q.start, q.end, q.n, q.region));
    }
    frontier_dp(&steps, &weights, q.start, q.end, q.n, q.region)
}

/// Shorthand for unit-weight or weighted quadrant counts between two points.
pub fn quadrant_count(
    spec: &WeightSpec,
    from: (i64, i64),
    to: (i64, i64),
    n: usize,
) -> BigRational {
    count_walks(&CountQuery::new(
        spec.clone(),
        from,
        Endpoint::Point(to.0, to.1),
        n,
        Region::Quadrant,
    ))
}

/// Floating-point count, used for probabilities of long walks.
pub fn count_walks_f64(
    weights: &[(Step, f64)],
    start: (i64, i64),
    end: Endpoint,
    n: usize,
    region: Region,
) -> f64 {
    let steps: Vec<Step> = weights.iter().map(|p| p.0).collect();
    let w: Vec<f64> = weights.iter().map(|p| p.1).collect();
    frontier_dp(&steps, &w, start, end, n, region)
}

/// Polynomial in the face-step level counts: exponent vector (n_0, n_1, ...) to number of walks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Monomials(pub BTreeMap<Vec<usize>, BigInt>);

impl Zero for Monomials {
    fn zero() -> Self {
        Monomials(BTreeMap::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl Add for Monomials {
    type Output = Monomials;
    fn add(self, rhs: Monomials) -> Monomials {
        self + &rhs
    }
}

impl<'a> Add<&'a Monomials> for Monomials {
    type Output = Monomials;
    fn add(mut self, rhs: &'a Monomials) -> Monomials {
        for (k, v) in &rhs.0 {
            *self.0.entry(k.clone()).or_insert_with(BigInt::zero) += v;
        }
        self
    }
}

impl<'a> Mul<&'a Monomials> for Monomials {
    type Output = Monomials;
    fn mul(self, rhs: &'a Monomials) -> Monomials {
        let mut out = BTreeMap::new();
        for (k1, v1) in &self.0 {
            for (k2, v2) in &rhs.0 {
                let len = k1.len().max(k2.len());
                let mut k: Vec<usize> = (0..len)
                    .map(|i| k1.get(i).copied().unwrap_or(0) + k2.get(i).copied().unwrap_or(0))
                    .collect();
                while k.last() == Some(&0) {
                    k.pop();
                }
                *out.entry(k).or_insert_with(BigInt::zero) += v1 * v2;
            }
        }
        Monomials(out)
    }
}

fn level_monomial(level: Option<u32>) -> Monomials {
    let key = match level {
        None => Vec::new(),
        Some(r) => {
            let mut k = vec![0; r as usize + 1];
            k[r as usize] = 1;
            k
        }
    };
    Monomials(BTreeMap::from([(key, BigInt::one())]))
}

/// Number of confined walks per level-count vector (trailing zeros trimmed), unit weights.
pub fn count_refined(
    spec: &WeightSpec,
    start: (i64, i64),
    end: Endpoint,
    n: usize,
    region: Region,
) -> Result<BTreeMap<Vec<usize>, BigInt>> {
    if n > REFINED_MAX_LEN {
        return Err(Error::Domain(format!(
            "refined counting is limited to n <= {REFINED_MAX_LEN}"
        )));
    }
    Ok(count_refined_unchecked(spec, start, end, n, region))
}

fn count_refined_unchecked(
    spec: &WeightSpec,
    start: (i64, i64),
    end: Endpoint,
    n: usize,
    region: Region,
) -> BTreeMap<Vec<usize>, BigInt> {
    let steps = Step::alphabet(spec);
    let weights: Vec<Monomials> = steps.iter().map(|s| level_monomial(s.level())).collect();
    frontier_dp(&steps, &weights, start, end, n, region).0
}

/// Signed inclusion–exclusion giving the weight of marked orientations with signature `sig`
/// and `n` plain edges: [t^{n-1}] of the four-term combination of quadrant series.
pub fn count_marked(spec: &WeightSpec, sig: Signature, n: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain(
            "a marked orientation has at least one plain edge".into(),
        ));
    }
    let (a, b, c, d) = (sig.a as i64, sig.b as i64, sig.c as i64, sig.d as i64);
    let term = |a: i64, b: i64, c: i64, d: i64| -> BigRational {
        if a < 0 || b < 0 || c < 0 || d < 0 {
            return BigRational::zero();
        }
        quadrant_count(spec, (a, b), (c, d), n - 1)
    };
    Ok(
        term(a, b, c, d) - term(a, b - 1, c, d - 1) - term(a - 1, b, c - 1, d)
            + term(a - 1, b - 1, c - 1, d - 1),
    )
}

/// Visits every confined walk of length `n` over the steps with nonzero weight.
pub fn visit_walks(
    spec: &WeightSpec,
    n: usize,
    start: (i64, i64),
    region: Region,
    mut f: impl FnMut(&TandemWalk),
) -> Result<()> {
    if n > EXHAUSTIVE_MAX_LEN {
        return Err(Error::Domain(format!(
            "exhaustive enumeration is limited to n <= {EXHAUSTIVE_MAX_LEN}"
        )));
    }
    if !region.contains(start) {
        return Ok(());
    }
    let alphabet = Step::alphabet(spec);
    let mut walk = TandemWalk::new(Vec::with_capacity(n));
    fn rec(
        alphabet: &[Step],
        n: usize,
        pos: (i64, i64),
        region: Region,
        walk: &mut TandemWalk,
        f: &mut dyn FnMut(&TandemWalk),
    ) {
        if walk.steps.len() == n {
            f(walk);
            return;
        }
        for &s in alphabet {
            let (dx, dy) = s.vector();
            let q = (pos.0 + dx, pos.1 + dy);
            if region.contains(q) {
                walk.steps.push(s);
                rec(alphabet, n, q, region, walk, f);
                walk.steps.pop();
            }
        }
    }
    rec(&alphabet, n, start, region, &mut walk, &mut f);
    Ok(())
}

/// All confined walks of length `n`, in lexicographic step order.
pub fn exhaustive_walks(
    spec: &WeightSpec,
    n: usize,
    start: (i64, i64),
    region: Region,
) -> Result<Vec<TandemWalk>> {
    let mut out = Vec::new();
    visit_walks(spec, n, start, region, |w| out.push(w.clone()))?;
    Ok(out)
}

/// Weighted count of upper-half-plane walks from height `b` that touch height 0 and end at
/// height `a`. Only heights matter, so this is a one-dimensional DP with a touch flag.
pub fn count_halfplane_touching(spec: &WeightSpec, b: u64, a: u64, n: usize) -> BigRational {
    // Height increments: SE is -1; a face step (i, j) is +j.
    let mut moves: Vec<(i64, BigRational)> = Vec::new();
    if !spec.z_se.is_zero() {
        moves.push((-1, spec.z_se.clone()));
    }
    for (r, zr) in spec.z.iter().enumerate() {
        if zr.is_zero() {
            continue;
        }
        for j in 0..=r {
            moves.push((j as i64, zr.clone()));
        }
    }
    let mut frontier: BTreeMap<(i64, bool), BigRational> = BTreeMap::new();
    frontier.insert((b as i64, b == 0), BigRational::one());
    for _ in 0..n {
        let mut next: BTreeMap<(i64, bool), BigRational> = BTreeMap::new();
        for (&(h, touched), val) in &frontier {
            for (dh, w) in &moves {
                let h2 = h + dh;
                if h2 < 0 {
                    continue;
                }
                let key = (h2, touched || h2 == 0);
                *next.entry(key).or_insert_with(BigRational::zero) += val * w;
            }
        }
        frontier = next;
    }
    frontier
        .get(&(a as i64, true))
        .cloned()
        .unwrap_or_else(BigRational::zero)
}

/// Quadrant walk counts for the double-tandem step set, by plain DP.
/// Steps N, W, SE are counted by `l`, steps S, E, NW by `m`.
pub fn double_tandem_dp(a: i64, b: i64, c: i64, d: i64, l: usize, m: usize) -> BigInt {
    if a < 0 || b < 0 || c < 0 || d < 0 {
        return BigInt::zero();
    }
    let first = [(0, 1), (-1, 0), (1, -1)];
    let second = [(0, -1), (1, 0), (-1, 1)];
    let mut frontier: HashMap<(i64, i64, usize), BigInt> =
        HashMap::from([((a, b, 0), BigInt::one())]);
    for _ in 0..l + m {
        let mut next: HashMap<(i64, i64, usize), BigInt> = HashMap::new();
        for (&(x, y, used), val) in &frontier {
            for (set, bump) in [(&first, 1usize), (&second, 0usize)] {
                let used2 = used + bump;
                if used2 > l {
                    continue;
                }
                for (dx, dy) in set.iter() {
                    let (x2, y2) = (x + dx, y + dy);
                    if x2 >= 0 && y2 >= 0 {
                        *next.entry((x2, y2, used2)).or_insert_with(BigInt::zero) += val;
                    }
                }
            }
        }
        frontier = next;
    }
    frontier.remove(&(c, d, l)).unwrap_or_else(BigInt::zero)
}

/// Multinomial-free expansion of [x^X y^Y s^l t^m] 1/(1 - s(x̄+y+xȳ) - t(x+ȳ+x̄y)).
fn free_double_tandem(ex: i64, ey: i64, l: usize, m: usize) -> BigInt {
    // Choose counts (n1,n2,n3) of x̄, y, xȳ among l and (m1,m2,m3) of x, ȳ, x̄y among m.
    let fact = |k: usize| -> BigInt { (1..=k).fold(BigInt::one(), |acc, i| acc * i) };
    let mut total = BigInt::zero();
    for n1 in 0..=l {
        for n2 in 0..=l - n1 {
            let n3 = l - n1 - n2;
            for m1 in 0..=m {
                for m2 in 0..=m - m1 {
                    let m3 = m - m1 - m2;
                    let x = -(n1 as i64) + n3 as i64 + m1 as i64 - m3 as i64;
                    let y = n2 as i64 - n3 as i64 - m2 as i64 + m3 as i64;
                    if x == ex && y == ey {
                        total += fact(l + m)
                            / (fact(n1) * fact(n2) * fact(n3) * fact(m1) * fact(m2) * fact(m3));
                    }
                }
            }
        }
    }
    total
}

/// Reflection-principle count D[a,b,c,d;l,m] of double-tandem quadrant walks.
///
/// Sums over the six images of x^{a+1}y^{b+1} under the group generated by
/// (x,y) ↦ (x̄y, y) and (x,y) ↦ (x, xȳ), extracting [x^{c+1} y^{d+1}].
pub fn double_tandem_d(a: i64, b: i64, c: i64, d: i64, l: usize, m: usize) -> BigInt {
    if a < 0 || b < 0 || c < 0 || d < 0 {
        return BigInt::zero();
    }
    let (i, j) = (a + 1, b + 1);
    let orbit = [
        (i, j, 1),
        (-i, i + j, -1),
        (i + j, -j, -1),
        (-i - j, i, 1),
        (j, -i - j, 1),
        (-j, -i, -1),
    ];
    let mut total = BigInt::zero();
    for (u, v, sign) in orbit {
        let term = free_double_tandem(c + 1 - u, d + 1 - v, l, m);
        if sign > 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// D̃: walks that touch both axes, by inclusion–exclusion over D.
pub fn double_tandem_d_tilde(a: i64, b: i64, c: i64, d: i64, l: usize, m: usize) -> BigInt {
    double_tandem_d(a, b, c, d, l, m)
        - double_tandem_d(a - 1, b, c - 1, d, l, m)
        - double_tandem_d(a, b - 1, c, d - 1, l, m)
        + double_tandem_d(a - 1, b - 1, c - 1, d - 1, l, m)
}

/// Whether D̃[a,b,c,d;l,m] = D̃[d,b,c,a;l,m].
pub fn double_tandem_symmetry_check(
    a: u64,
    b: u64,
    c: u64,
    d: u64,
    l: usize,
    m: usize,
) -> Result<bool> {
    if l + m > 12 {
        return Err(Error::Domain(
            "double-tandem check is limited to l + m <= 12".into(),
        ));
    }
    let (a, b, c, d) = (a as i64, b as i64, c as i64, d as i64);
    Ok(double_tandem_d_tilde(a, b, c, d, l, m) == double_tandem_d_tilde(d, b, c, a, l, m))
}

/// Converts a rational to f64 when it fits.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn excursions(spec: &WeightSpec, n: usize) -> BigRational {
        quadrant_count(spec, (0, 0), (0, 0), n)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(
            excursions(&WeightSpec::all_ones(3), 4),
            BigRational::from_integer(6.into())
        );
        assert_eq!(
            excursions(&WeightSpec::from_ints(&[0, 1]), 6),
            BigRational::from_integer(5.into())
        );
        let q2 = WeightSpec::single_level(2);
        assert_eq!(excursions(&q2, 4), BigRational::one());
        assert_eq!(excursions(&q2, 2), BigRational::zero());
    }

    #[test]
    fn unconstrained_total_is_a_power() {
        let spec = WeightSpec::from_ints(&[1, 2, 3]);
        let total: i64 = 1 + 1 + 2 * 2 + 3 * 3;
        for n in 0..5 {
            let q = CountQuery::new(spec.clone(), (0, 0), Endpoint::Any, n, Region::None);
            assert_eq!(
                count_walks(&q),
                BigRational::from_integer(BigInt::from(total).pow(n as u32))
            );
        }
    }

    #[test]
    fn unique_small_excursion() {
        let spec = WeightSpec::from_ints(&[0, 1]);
        let all = exhaustive_walks(&spec, 3, (0, 0), Region::Quadrant).unwrap();
        let exc: Vec<_> = all
            .into_iter()
            .filter(|w| w.displacement() == (0, 0))
            .collect();
        assert_eq!(
            exc,
            vec![TandemWalk::new(vec![
                Step::Face(0, 1),
                Step::SE,
                Step::Face(1, 0)
            ])]
        );
        assert!(exhaustive_walks(&spec, 11, (0, 0), Region::Quadrant).is_err());
        assert_eq!(
            exhaustive_walks(&spec, 0, (0, 0), Region::Quadrant)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn reflection_formula_matches_dp() {
        for (a, b, c, d) in [(0, 0, 0, 0), (1, 0, 0, 2), (2, 1, 0, 1), (0, 2, 1, 1)] {
            for l in 0..5 {
                for m in 0..5 {
                    assert_eq!(
                        double_tandem_d(a, b, c, d, l, m),
                        double_tandem_dp(a, b, c, d, l, m),
                        "({a},{b},{c},{d};{l},{m})"
                    );
                }
            }
        }
    }
}
