//! Exact counting formulas and P-recursive sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `m!`.
pub fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, k| acc * k)
}

/// Binomial coefficient, zero when `j < 0` or `j > m` (including every negative `m`).
pub fn binomial(m: i64, j: i64) -> BigInt {
    if j < 0 || m < 0 || j > m {
        return BigInt::zero();
    }
    let j = j.min(m - j);
    let mut out = BigInt::one();
    for k in 0..j {
        out = out * (m - k) / (k + 1);
    }
    out
}

fn exact_div(num: BigInt, den: &BigInt, what: &str) -> BigInt {
    let (q, r) = num.div_rem(den);
    assert!(r.is_zero(), "{what}: inexact division");
    q
}

/// Tutte's count of bipolar triangulations of a digon with k+2 vertices:
/// `2 (3k)! / (k! (k+1)! (k+2)!)`.
pub fn tutte_a(k: u64) -> BigInt {
    let num = BigInt::from(2) * factorial(3 * k);
    let den = factorial(k) * factorial(k + 1) * factorial(k + 2);
    exact_div(num, &den, "tutte_a")
}

/// Number of plane bipolar orientations with n edges, by the summation formula.
pub fn baxter_b(n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Domain("b(n) is defined for n >= 1".into()));
    }
    let m1 = n as i64 + 1;
    let sum = (1..=n as i64).fold(BigInt::zero(), |acc, m| {
        acc + binomial(m1, m - 1) * binomial(m1, m) * binomial(m1, m + 1)
    });
    let den = BigInt::from(n) * BigInt::from(n + 1) * BigInt::from(n + 1);
    Ok(exact_div(sum * 2, &den, "baxter_b"))
}

/// `b(0..=n_max)` by `(n+2)(n+3) b(n) = (7n^2+7n-2) b(n-1) + 8(n-1)(n-2) b(n-2)`, with b(0) = 1.
pub fn baxter_recurrence(n_max: u64) -> Vec<BigInt> {
    let mut b = vec![BigInt::one()];
    let mut prev2 = BigInt::zero();
    for n in 1..=n_max as i64 {
        let rhs = BigInt::from(7 * n * n + 7 * n - 2) * &b[(n - 1) as usize]
            + BigInt::from(8 * (n - 1) * (n - 2)) * &prev2;
        prev2 = b[(n - 1) as usize].clone();
        b.push(exact_div(
            rhs,
            &BigInt::from((n + 2) * (n + 3)),
            "baxter recurrence",
        ));
    }
    b
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Excursion counts with a single face level p in {1, 2, 3}, by the recurrences computed from
/// the constant-term expression: `a(0..=k_max)`, seeded with a(-1) = 0, a(0) = 1.
///
/// For p = 1, a(k) counts digon triangulations with 2k inner faces; for p = 2, digon
/// quadrangulations with k inner faces; for p = 3, digon pentagulations with 2k inner faces.
pub fn dangulation_sequence(p: u32, k_max: u64) -> Result<Vec<BigInt>> {
    // Each recurrence is written as lead(k) a(k+s) = c1(k) a(k+s-1) + c0(k) a(k+s-2); `s` is
    // the order.
    type Coeffs = fn(i64) -> (BigInt, BigInt, BigInt);
    let (order, coeffs): (i64, Coeffs) = match p {
        1 => (1, |k| {
            (
                big((k + 3) * (k + 2)),
                big(3 * (3 * k + 2) * (3 * k + 1)),
                BigInt::zero(),
            )
        }),
        2 => (2, |k| {
            (
                big((k + 4) * (k + 3) * (k + 3)),
                big(4 * (2 * k + 3) * (k + 3) * (k + 1)),
                big(12 * (2 * k + 3) * (2 * k + 1) * (k + 1)),
            )
        }),
        3 => (2, |k| {
            let lead = big(27)
                * big(3 * k + 8)
                * big(3 * k + 4)
                * big(5 * k + 3)
                * big((3 * k + 5).pow(2))
                * big((3 * k + 7).pow(2))
                * big((k + 2).pow(2));
            let c1 = big(60)
                * big(5 * k + 7)
                * big(3 * k + 5)
                * big(5 * k + 9)
                * big(5 * k + 6)
                * big(3 * k + 4)
                * big(8 + 5 * k)
                * big(145 * k.pow(3) + 532 * k.pow(2) + 626 * k + 233);
            let c0 = -big(800)
                * big(5 * k + 6)
                * big(5 * k + 1)
                * big(5 * k + 7)
                * big(5 * k + 2)
                * big(5 * k + 3)
                * big(5 * k + 9)
                * big(5 * k + 4)
                * big((8 + 5 * k).pow(2));
            (lead, c1, c0)
        }),
        _ => return Err(Error::Domain(format!("no recurrence for p = {p}"))),
    };
    // a[0] holds a(-1).
    let mut a = vec![BigInt::zero(), BigInt::one()];
    let mut k = if order == 1 { 0 } else { -1 };
    while (a.len() as u64) < k_max + 2 {
        let (lead, c1, c0) = coeffs(k);
        // a(m) sits at index m + 1, so the new term a(k + order) lands at index k + order + 1.
        let i1 = (k + order) as usize;
        debug_assert_eq!(a.len(), i1 + 1);
        let rhs = c1 * &a[i1]
            + if order == 2 {
                c0 * &a[i1 - 1]
            } else {
                BigInt::zero()
            };
        a.push(exact_div(rhs, &lead, "d-angulation recurrence"));
        k += 1;
    }
    a.remove(0);
    a.truncate(k_max as usize + 1);
    Ok(a)
}

/// Non-intersecting triples of directed walks: the 3x3 binomial determinant counting quadrant
/// tandem walks of length n with k face steps from (a,b) to (c,d).
///
/// Points outside the quadrant have no walks, so negative coordinates give 0 rather than the
/// determinant's value there.
pub fn lgv_qnk(n: i64, k: i64, a: i64, b: i64, c: i64, d: i64) -> BigInt {
    if a < 0 || b < 0 || c < 0 || d < 0 {
        return BigInt::zero();
    }
    let m = [
        [
            binomial(n + a - c - 1, k - 1),
            binomial(n + a, k - 1),
            binomial(n + a + d, k - 2),
        ],
        [
            binomial(n - c - 1, k),
            binomial(n, k),
            binomial(n + d, k - 1),
        ],
        [
            binomial(n - b - c - 2, k),
            binomial(n - b - 1, k),
            binomial(n - b + d - 1, k - 1),
        ],
    ];
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Marked bipolar orientations with n+1 plain edges, k inner faces and signature (a,b;c,d).
pub fn marked_qnk_tilde(n: i64, k: i64, a: i64, b: i64, c: i64, d: i64) -> BigInt {
    lgv_qnk(n, k, a, b, c, d)
        - lgv_qnk(n, k, a - 1, b, c - 1, d)
        - lgv_qnk(n, k, a, b - 1, c, d - 1)
        + lgv_qnk(n, k, a - 1, b - 1, c - 1, d - 1)
}

/// The Baxter summand `2/(n^2 (n-1)) C(n,k-2) C(n,k-1) C(n,k)`.
pub fn baxter_summand(n: i64, k: i64) -> BigInt {
    let num = BigInt::from(2) * binomial(n, k - 2) * binomial(n, k - 1) * binomial(n, k);
    exact_div(num, &BigInt::from(n * n * (n - 1)), "baxter summand")
}

/// Uniform p = 1 quadrant walks of length n from the origin to (i,j):
/// `(i+1)(j+1)(i+j+2) n! / (m! (m+i+1)! (m+i+j+2)!)` with n = 3m+2i+j, and 0 otherwise.
pub fn exact_p1_endpoint(n: u64, i: u64, j: u64) -> BigInt {
    let used = 2 * i + j;
    if used > n || (n - used) % 3 != 0 {
        return BigInt::zero();
    }
    let m = (n - used) / 3;
    let num = BigInt::from((i + 1) * (j + 1) * (i + j + 2)) * factorial(n);
    let den = factorial(m) * factorial(m + i + 1) * factorial(m + i + j + 2);
    exact_div(num, &den, "p1 endpoint")
}

/// `num / den` as a float, accurate even when both overflow f64.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if den.is_zero() {
        return f64::NAN;
    }
    let shift = num.bits() as i64 - den.bits() as i64;
    // Scale so the quotient keeps about 64 significant bits.
    let (n2, d2) = if shift > 0 {
        (num << 64usize, den << (shift as usize))
    } else {
        (num << (64 + (-shift) as usize), den.clone())
    };
    let q = (n2 / d2).to_f64().unwrap_or(f64::NAN);
    let sign = if num.is_negative() != den.is_negative() {
        -1.0
    } else {
        1.0
    };
    sign * q.abs() * 2f64.powi((shift - 64).clamp(-1100, 1100) as i32)
}

/// σ·V(a,b) for p = 1, z = z_1 = 1/3: 3(a+1)(b+1)(a+b+2), so that V(a,b) = 3√3(a+1)(b+1)(a+b+2).
pub fn harmonic_p1_rational(a: u64, b: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(3 * (a + 1) * (b + 1) * (a + b + 2)))
}

/// σ·V(a,b) for p = 2, z_2 = 1/6, z = 1/2:
/// (3/2)(b+1)((a+1)(a+b+2) + a/2 + b/4 + 5/8 - (2b+1)/8 (-1/3)^(a+1)).
pub fn harmonic_p2_rational(a: u64, b: u64) -> BigRational {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let (ai, bi) = (a as i64, b as i64);
    let third = BigRational::new(BigInt::from(-1), BigInt::from(3));
    let pow = num_traits::pow(third, a as usize + 1);
    let inner =
        r((ai + 1) * (ai + bi + 2), 1) + r(ai, 2) + r(bi, 4) + r(5, 8) - r(2 * bi + 1, 8) * pow;
    r(3 * (bi + 1), 2) * inner
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_values() {
        assert_eq!(tutte_a(0), BigInt::one());
        assert_eq!(tutte_a(2), BigInt::from(5));
        assert_eq!(tutte_a(3), BigInt::from(42));
        assert_eq!(baxter_b(1).unwrap(), BigInt::one());
        assert_eq!(baxter_b(2).unwrap(), BigInt::from(2));
        assert_eq!(baxter_b(3).unwrap(), BigInt::from(6));
        assert!(baxter_b(0).is_err());
        assert_eq!(binomial(-3, 1), BigInt::zero());
        assert_eq!(binomial(5, 6), BigInt::zero());
        assert_eq!(binomial(6, 3), BigInt::from(20));
    }

    #[test]
    fn recurrences_match_formulas() {
        let rec = baxter_recurrence(60);
        for n in 1..=60 {
            assert_eq!(rec[n as usize], baxter_b(n).unwrap(), "n={n}");
        }
        let tri = dangulation_sequence(1, 80).unwrap();
        for k in 0..=80 {
            assert_eq!(tri[k as usize], tutte_a(k));
        }
        assert_eq!(dangulation_sequence(2, 4).unwrap(), ints(&[1, 0, 1, 2, 14]));
        assert_eq!(
            &dangulation_sequence(3, 1).unwrap()[..2],
            &ints(&[1, 1])[..]
        );
        assert!(dangulation_sequence(4, 3).is_err());
    }

    #[test]
    fn lgv_values() {
        assert_eq!(lgv_qnk(4, 2, 0, 0, 0, 0), BigInt::one());
        assert_eq!(lgv_qnk(4, 0, 0, 0, 0, 0), BigInt::zero());
        let total: BigInt = (0..=4).map(|k| lgv_qnk(4, k, 0, 0, 0, 0)).sum();
        assert_eq!(total, BigInt::from(6));
        for n in 2..=10 {
            for k in 0..=n {
                assert_eq!(
                    lgv_qnk(n, k, 0, 0, 0, 0),
                    baxter_summand(n, k),
                    "n={n} k={k}"
                );
            }
        }
        assert_eq!(
            marked_qnk_tilde(5, 2, 0, 1, 2, 0),
            lgv_qnk(5, 2, 0, 1, 2, 0)
        );
    }

    #[test]
    fn p1_endpoint_values() {
        assert_eq!(exact_p1_endpoint(0, 0, 0), BigInt::one());
        assert_eq!(exact_p1_endpoint(3, 0, 0), BigInt::one());
        assert_eq!(exact_p1_endpoint(1, 0, 1), BigInt::one());
        assert_eq!(exact_p1_endpoint(6, 0, 0), BigInt::from(5));
        assert_eq!(exact_p1_endpoint(2, 0, 0), BigInt::zero());
    }

    #[test]
    fn float_ratios() {
        let big = BigInt::from(10).pow(400);
        let r = ratio_to_f64(&(&big * 3), &(&big * 4));
        assert!((r - 0.75).abs() < 1e-15);
        assert!((ratio_to_f64(&BigInt::from(-1), &BigInt::from(3)) + 1.0 / 3.0).abs() < 1e-15);
        assert!(
            (ratio_to_f64(&BigInt::from(7), &BigInt::from(2).pow(300)) - 7.0 * 2f64.powi(-300))
                .abs()
                < 1e-300
        );
    }
}
