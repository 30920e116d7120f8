//! Random generation of z-distributed tandem walks.
//!
//! All samplers draw from `ChaCha8Rng::seed_from_u64(seed)`, so a seed fixes the output.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, WeightedIndex};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kmsw::{rho_on_walks, sigma_on_walks};
use crate::steps::{Step, TandemWalk};
use crate::stochastics::{g0, g_density, StepDistribution};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sampler for upper-half-plane walks from the origin that end on the x-axis.
///
/// The heights form a critical Galton–Watson (Łukasiewicz) path: n+1 i.i.d. height increments
/// conditioned on summing to -1 are drawn as multinomial counts with rejection, shuffled, and
/// rotated by the cycle lemma. Each nonnegative increment j is then lifted to a face step
/// (r-j, j) with r chosen proportionally to z_r among levels r ≥ j.
#[derive(Clone, Debug)]
pub struct HalfplaneSampler {
    /// Probability of height increment j-1, for j = 0..=p+1.
    increments: Vec<f64>,
    /// For height increment j ≥ 0, the level distribution over r = j..=p.
    lifts: Vec<WeightedIndex<f64>>,
}

impl HalfplaneSampler {
    pub fn new(dist: &StepDistribution<f64>) -> Result<Self> {
        if !dist.is_zero_drift() {
            return Err(Error::Domain(
                "the sampler needs a zero-drift distribution".into(),
            ));
        }
        let p = dist.p();
        let mut increments = vec![dist.z];
        increments.extend((0..=p).map(|j| dist.zr[j..].iter().sum::<f64>()));
        let lifts = (0..=p)
            .map(|j| {
                WeightedIndex::new(&dist.zr[j..])
                    .map_err(|e| Error::Domain(format!("level weights: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(HalfplaneSampler { increments, lifts })
    }

    /// Height increments of a Łukasiewicz path of n+1 steps, already rotated so that -1 is first
    /// reached at the end.
    fn heights<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<i64> {
        let total = n as u64 + 1;
        let counts = loop {
            let mut counts = Vec::with_capacity(self.increments.len());
            let mut left = total;
            let mut mass = 1.0f64;
            for (k, &pr) in self.increments.iter().enumerate() {
                let c = if k + 1 == self.increments.len() || left == 0 {
                    left
                } else {
                    let q = (pr / mass).clamp(0.0, 1.0);
                    Binomial::new(left, q)
                        .expect("probability in range")
                        .sample(rng)
                };
                counts.push(c);
                left -= c;
                mass -= pr;
            }
            let sum: i64 = counts
                .iter()
                .enumerate()
                .map(|(k, &c)| (k as i64 - 1) * c as i64)
                .sum();
            if sum == -1 {
                break counts;
            }
        };
        let mut seq: Vec<i64> = counts
            .iter()
            .enumerate()
            .flat_map(|(k, &c)| std::iter::repeat(k as i64 - 1).take(c as usize))
            .collect();
        seq.shuffle(rng);
        // Cycle lemma: start right after the first time the partial sums reach their minimum.
        let (mut s, mut min, mut at) = (0i64, i64::MAX, 0usize);
        for (k, &v) in seq.iter().enumerate() {
            s += v;
            if s < min {
                min = s;
                at = k;
            }
        }
        seq.rotate_left(at + 1);
        seq
    }

    /// A z-distributed walk of length n in the upper half-plane from the origin, ending on the x-axis.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> TandemWalk {
        let mut seq = self.heights(n, rng);
        debug_assert_eq!(seq.last(), Some(&-1));
        seq.pop();
        let steps = seq
            .into_iter()
            .map(|j| {
                if j < 0 {
                    Step::SE
                } else {
                    let j = j as usize;
                    let r = j + self.lifts[j].sample(rng);
                    Step::Face((r - j) as u32, j as u32)
                }
            })
            .collect();
        TandemWalk::new(steps)
    }

    /// A z-distributed quadrant walk of length n from the origin, the image of a half-plane sample
    /// under the walk involution exchanging the statistics a and d.
    pub fn sample_quadrant<R: Rng>(&self, n: usize, rng: &mut R) -> TandemWalk {
        sigma_on_walks(&self.sample(n, rng))
    }
}

pub fn sample_halfplane(dist: &StepDistribution<f64>, n: usize, seed: u64) -> Result<TandemWalk> {
    Ok(HalfplaneSampler::new(dist)?.sample(n, &mut rng_from_seed(seed)))
}

pub fn sample_quadrant(dist: &StepDistribution<f64>, n: usize, seed: u64) -> Result<TandemWalk> {
    Ok(HalfplaneSampler::new(dist)?.sample_quadrant(n, &mut rng_from_seed(seed)))
}

/// (i+1)(j+1)(i+j+2), zero when i = -1 or j = -1.
fn p1_poly(i: i64, j: i64) -> u128 {
    if i < 0 || j < 0 {
        return 0;
    }
    ((i + 1) * (j + 1) * (i + j + 2)) as u128
}

/// Uniform excursion of length n for p = 1 (steps SE, (-1,0), (0,1)), drawn backward.
///
/// Being at (i,j) after k steps with k = 3m+2i+j, the k-th step is chosen with probability
/// q_{k-1}(previous point)/q_k(i,j), where q_k(i,j) = (i+1)(j+1)(i+j+2) k!/(m!(m+i+1)!(m+i+j+2)!).
/// The three ratios reduce to the integers below, whose sum is k(i+1)(j+1)(i+j+2).
pub fn sample_excursion_p1_with<R: Rng>(n: usize, rng: &mut R) -> Result<TandemWalk> {
    if n % 3 != 0 {
        return Err(Error::Domain(format!(
            "p=1 excursions have length divisible by 3, got {n}"
        )));
    }
    let (mut i, mut j) = (0i64, 0i64);
    let mut steps = Vec::with_capacity(n);
    for k in (1..=n as i64).rev() {
        let m = (k - 2 * i - j) / 3;
        let options = [
            (Step::SE, p1_poly(i - 1, j + 1) * (m + i + 1) as u128),
            (Step::Face(1, 0), p1_poly(i + 1, j) * m as u128),
            (
                Step::Face(0, 1),
                p1_poly(i, j - 1) * (m + i + j + 2) as u128,
            ),
        ];
        let total: u128 = options.iter().map(|o| o.1).sum();
        if total != p1_poly(i, j) * k as u128 {
            return Err(Error::Internal(format!(
                "transition weights do not sum at ({i},{j}), k={k}"
            )));
        }
        let mut u = rng.gen_range(0..total);
        let step = options
            .iter()
            .find(|o| {
                if u < o.1 {
                    true
                } else {
                    u -= o.1;
                    false
                }
            })
            .expect("u < total")
            .0;
        let (dx, dy) = step.vector();
        i -= dx;
        j -= dy;
        steps.push(step);
    }
    debug_assert_eq!((i, j), (0, 0));
    steps.reverse();
    Ok(TandemWalk::new(steps))
}

pub fn sample_excursion_p1(n: usize, seed: u64) -> Result<TandemWalk> {
    sample_excursion_p1_with(n, &mut rng_from_seed(seed))
}

/// An excursion of length m ∈ [2n, 3n] with the bookkeeping of its construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowedSample {
    pub walk: TandemWalk,
    pub n: usize,
    pub m: usize,
    /// Point visited after n steps.
    pub midpoint: (i64, i64),
    /// Second-half walks discarded for not revisiting the target point.
    pub retries: usize,
    /// Excursions discarded by the density coin.
    pub rejections: usize,
    /// First halves abandoned because (b,a) was out of reach or not hit within the redraw cap.
    pub restarts: usize,
}

/// Redraws of the second half allowed for one first half.
pub const MAX_SECOND_HALF_DRAWS: usize = 10_000;

/// Whether a quadrant walk of length ≤ len from the origin can visit (x, y) with levels ≤ p:
/// it needs x SE steps and enough face steps to lift the height by x + y.
fn reachable((x, y): (i64, i64), len: usize, p: usize) -> bool {
    let lifts = (x + y + p as i64 - 1) / p as i64;
    x + lifts <= len as i64
}

/// Windowed excursion sampler.
///
/// w₁ is a quadrant walk of length n ending at (a,b); w₂ is a quadrant walk of length 2n, redrawn
/// until it visits (b,a) at some time in [n, 2n]. With n' the last such time, the output is w₁
/// followed by the time-reversed, x/y-swapped prefix of length n' of w₂. A coin with success
/// probability g(X/(σ√(α n)), Y/(σ√(α n)))/g₀, α = n'/n, then accepts or restarts.
///
/// Conditioned on its length and on the point reached after n steps the output is exactly
/// z-distributed; the coin only corrects the law of that point, and only asymptotically. A first
/// half is abandoned when (b,a) is out of reach or after [`MAX_SECOND_HALF_DRAWS`] misses; both
/// depend on (a,b) alone, so the conditional law is unaffected.
pub fn sample_excursion_windowed_with<R: Rng>(
    dist: &StepDistribution<f64>,
    n: usize,
    rng: &mut R,
) -> Result<WindowedSample> {
    if n == 0 {
        return Err(Error::Domain("window size must be positive".into()));
    }
    let sampler = HalfplaneSampler::new(dist)?;
    let sigma = dist.sigma2().sqrt();
    let g_max = g0();
    let (mut retries, mut rejections, mut restarts) = (0, 0, 0);
    'outer: loop {
        let w1 = sampler.sample_quadrant(n, rng);
        let (a, b) = w1.displacement();
        if !reachable((b, a), 2 * n, dist.p()) {
            restarts += 1;
            continue;
        }
        // The coin is split in two: a first flip with the largest success probability over
        // n' ∈ [n, 2n] before w₂ is drawn, then the ratio once n' is known.
        let coin = |np: usize| {
            let scale = sigma * (np as f64).sqrt();
            g_density(a as f64 / scale, b as f64 / scale) / g_max
        };
        let bound = (n..=2 * n).map(coin).fold(0.0, f64::max);
        if rng.gen::<f64>() >= bound {
            rejections += 1;
            continue;
        }
        let mut draws = 0;
        let (w3, n_prime) = loop {
            let w2 = sampler.sample_quadrant(2 * n, rng);
            let traj = w2.trajectory((0, 0));
            if let Some(t) = (n..=2 * n).rev().find(|&t| traj[t] == (b, a)) {
                break (TandemWalk::new(w2.steps[..t].to_vec()), t);
            }
            retries += 1;
            draws += 1;
            if draws == MAX_SECOND_HALF_DRAWS {
                restarts += 1;
                continue 'outer;
            }
        };
        if rng.gen::<f64>() * bound >= coin(n_prime) {
            rejections += 1;
            continue;
        }
        let mut steps = w1.steps;
        steps.extend(rho_on_walks(&w3).steps);
        return Ok(WindowedSample {
            walk: TandemWalk::new(steps),
            n,
            m: n + n_prime,
            midpoint: (a, b),
            retries,
            rejections,
            restarts,
        });
    }
}

pub fn sample_excursion_windowed(
    dist: &StepDistribution<f64>,
    n: usize,
    seed: u64,
) -> Result<WindowedSample> {
    sample_excursion_windowed_with(dist, n, &mut rng_from_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steps::{is_confined, Region};

    fn p1() -> StepDistribution<f64> {
        StepDistribution::uniform_p1().to_f64()
    }

    #[test]
    fn shapes() {
        let w = sample_halfplane(&p1(), 50, 7).unwrap();
        assert_eq!(w.len(), 50);
        assert!(is_confined(&w, (0, 0), Region::UpperHalfplane));
        assert_eq!(w.displacement().1, 0);
        let q = sample_quadrant(&p1(), 50, 7).unwrap();
        assert!(is_confined(&q, (0, 0), Region::Quadrant));
        assert_eq!(q.level_counts(), w.level_counts());
        assert!(sample_halfplane(&p1(), 0, 1).unwrap().is_empty());
    }

    #[test]
    fn p1_excursions() {
        let w = sample_excursion_p1(3, 1).unwrap();
        assert_eq!(
            w,
            TandemWalk::new(vec![Step::Face(0, 1), Step::SE, Step::Face(1, 0)])
        );
        let w = sample_excursion_p1(300, 9).unwrap();
        assert_eq!(w.len(), 300);
        assert!(is_confined(&w, (0, 0), Region::Quadrant));
        assert_eq!(w.displacement(), (0, 0));
        assert_eq!(w, sample_excursion_p1(300, 9).unwrap());
        assert!(sample_excursion_p1(4, 1).is_err());
    }

    #[test]
    fn windowed() {
        let s = sample_excursion_windowed(&p1(), 10, 3).unwrap();
        assert!((20..=30).contains(&s.m));
        assert_eq!(s.walk.len(), s.m);
        assert!(is_confined(&s.walk, (0, 0), Region::Quadrant));
        assert_eq!(s.walk.displacement(), (0, 0));
        assert_eq!(s.walk.trajectory((0, 0))[10], s.midpoint);
    }
}
