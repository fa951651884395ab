//! Integer arithmetic over `Z_p*`, the Diffie-Hellman protocol, and the
//! multiplicative dynamical systems `x_{k+1} = c·x_k mod p` it induces.
//!
//! Everything here is arbitrary precision. Operations that walk a whole
//! orbit additionally need `p - 1` to fit a `usize`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Public parameters of a key exchange: an odd prime `p > 3` and a
/// primitive root `m` modulo `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DhParams {
    #[serde(serialize_with = "crate::io::ser_display")]
    p: BigUint,
    #[serde(serialize_with = "crate::io::ser_display")]
    m: BigUint,
}

impl DhParams {
    pub fn new(p: impl Into<BigUint>, m: impl Into<BigUint>) -> Result<Self> {
        let (p, m) = (p.into(), m.into());
        if p <= BigUint::from(3u32) {
            return Err(Error::InvalidParameter(format!("modulus {p} must exceed 3")));
        }
        if m < BigUint::from(2u32) || m >= p {
            return Err(Error::InvalidParameter(format!(
                "generator {m} outside [2, {}]",
                &p - 1u32
            )));
        }
        if !is_primitive_root(&m, &p)? {
            return Err(Error::NotPrimitiveRoot {
                p: p.to_string(),
                m: m.to_string(),
            });
        }
        Ok(DhParams { p, m })
    }

    /// Parameters using the smallest primitive root of `p`.
    pub fn with_smallest_root(p: impl Into<BigUint>) -> Result<Self> {
        let p = p.into();
        let m = find_primitive_root(&p)?;
        Ok(DhParams { p, m })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn m(&self) -> &BigUint {
        &self.m
    }

    /// `p - 1`, the period of every orbit started at a unit.
    pub fn period(&self) -> Result<usize> {
        to_index(&(&self.p - 1u32))
    }

    /// `(p - 1) / 2`, the order of the minimal exact lifting.
    pub fn half_period(&self) -> Result<usize> {
        Ok(self.period()? / 2)
    }

    /// Base trajectory `x_{k+1} = m x_k`, `x_0 = 1`, over one full period.
    pub fn base_trajectory(&self) -> Result<ModTrajectory> {
        simulate(&self.m, self, &BigUint::one(), self.period()?)
    }
}

pub(crate) fn to_index(n: &BigUint) -> Result<usize> {
    n.to_usize().ok_or_else(|| Error::TooLarge(n.to_string()))
}

/// A finite orbit of `x_{k+1} = multiplier · x_k mod p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModTrajectory {
    params: DhParams,
    #[serde(serialize_with = "crate::io::ser_display")]
    multiplier: BigUint,
    #[serde(serialize_with = "crate::io::ser_display")]
    x0: BigUint,
    #[serde(serialize_with = "crate::io::ser_display_seq")]
    values: Vec<BigUint>,
}

impl ModTrajectory {
    pub fn params(&self) -> &DhParams {
        &self.params
    }

    pub fn multiplier(&self) -> &BigUint {
        &self.multiplier
    }

    pub fn x0(&self) -> &BigUint {
        &self.x0
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// State at step `k`. Steps past the stored horizon are produced by the
    /// dynamics itself, `x_0 · c^k mod p`.
    pub fn state(&self, k: usize) -> BigUint {
        match self.values.get(k) {
            Some(v) => v.clone(),
            None => {
                let c = self.multiplier.modpow(&BigUint::from(k), &self.params.p);
                (c * &self.x0) % &self.params.p
            }
        }
    }
}

/// `base^exp mod p` by left-to-right square-and-multiply.
pub fn mod_pow(base: &BigUint, exp: &BigUint, p: &BigUint) -> Result<BigUint> {
    if *p < BigUint::from(2u32) {
        return Err(Error::InvalidParameter(format!("modulus {p} below 2")));
    }
    let base = base % p;
    let mut acc = BigUint::one() % p;
    for i in (0..exp.bits()).rev() {
        acc = &acc * &acc % p;
        if exp.bit(i) {
            acc = acc * &base % p;
        }
    }
    Ok(acc)
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    if *n < BigUint::from(4u32) {
        return true;
    }
    if n.is_even() {
        return false;
    }
    let limit = n.sqrt();
    let mut d = BigUint::from(3u32);
    while d <= limit {
        if (n % &d).is_zero() {
            return false;
        }
        d += 2u32;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(n: &BigUint) -> Vec<BigUint> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut d = BigUint::from(2u32);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1u32;
    }
    if n > BigUint::one() {
        out.push(n);
    }
    out
}

/// Whether `m` has multiplicative order `p - 1` modulo the prime `p`.
pub fn is_primitive_root(m: &BigUint, p: &BigUint) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if m.is_zero() || m >= p {
        return Err(Error::InvalidParameter(format!("{m} outside [1, {}]", p - 1u32)));
    }
    let order = p - 1u32;
    for r in prime_factors(&order) {
        if mod_pow(m, &(&order / &r), p)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest primitive root modulo the prime `p > 3`.
pub fn find_primitive_root(p: &BigUint) -> Result<BigUint> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if *p <= BigUint::from(3u32) {
        return Err(Error::InvalidParameter(format!("modulus {p} must exceed 3")));
    }
    let mut m = BigUint::from(2u32);
    while &m < p {
        if is_primitive_root(&m, p)? {
            return Ok(m);
        }
        m += 1u32;
    }
    Err(Error::Internal(format!("no primitive root found modulo {p}")))
}

/// All primitive roots modulo the prime `p`, ascending.
pub fn primitive_roots(p: &BigUint) -> Result<Vec<BigUint>> {
    let mut out = Vec::new();
    let mut m = BigUint::one();
    while &m < p {
        if is_primitive_root(&m, p)? {
            out.push(m.clone());
        }
        m += 1u32;
    }
    Ok(out)
}

/// Runs `x_{k+1} = multiplier · x_k mod p` for `steps` steps from `x0`.
pub fn simulate(
    multiplier: &BigUint,
    params: &DhParams,
    x0: &BigUint,
    steps: usize,
) -> Result<ModTrajectory> {
    let p = &params.p;
    if !multiplier.gcd(p).is_one() {
        return Err(Error::InvalidParameter(format!(
            "multiplier {multiplier} shares a factor with {p}"
        )));
    }
    if (x0 % p).is_zero() {
        return Err(Error::InvalidParameter(
            "initial state is 0 mod p; the orbit collapses".into(),
        ));
    }
    if x0 >= p {
        return Err(Error::InvalidParameter(format!("initial state {x0} outside [1, {}]", p - 1u32)));
    }
    let c = multiplier % p;
    let mut values = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    values.push(x.clone());
    for _ in 0..steps {
        x = &x * &c % p;
        values.push(x.clone());
    }
    Ok(ModTrajectory {
        params: params.clone(),
        multiplier: c,
        x0: x0.clone(),
        values,
    })
}

/// Quadratic character of `m` modulo an odd prime, decided by Euler's
/// criterion `m^{(p-1)/2} ≡ ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Residuosity {
    Residue,
    NonResidue,
}

impl Residuosity {
    pub fn sign(self) -> i8 {
        match self {
            Residuosity::Residue => 1,
            Residuosity::NonResidue => -1,
        }
    }
}

pub fn euler_criterion(m: &BigUint, p: &BigUint) -> Result<Residuosity> {
    if !is_prime(p) || p.is_even() {
        return Err(Error::InvalidParameter(format!("{p} is not an odd prime")));
    }
    if !m.gcd(p).is_one() {
        return Err(Error::InvalidParameter(format!("{m} is not coprime to {p}")));
    }
    let r = mod_pow(m, &((p - 1u32) >> 1), p)?;
    if r.is_one() {
        Ok(Residuosity::Residue)
    } else if r == p - 1u32 {
        Ok(Residuosity::NonResidue)
    } else {
        Err(Error::Internal(format!("Euler residue {r} is neither 1 nor -1")))
    }
}

/// Public and shared values of one exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DhTranscript {
    pub params: DhParams,
    #[serde(serialize_with = "crate::io::ser_display")]
    pub e: BigUint,
    #[serde(serialize_with = "crate::io::ser_display")]
    pub d: BigUint,
    #[serde(serialize_with = "crate::io::ser_display")]
    pub c_e: BigUint,
    #[serde(serialize_with = "crate::io::ser_display")]
    pub c_d: BigUint,
    #[serde(serialize_with = "crate::io::ser_display")]
    pub c_ed: BigUint,
}

fn check_exponent(x: &BigUint, p: &BigUint, what: &str) -> Result<()> {
    if x.is_zero() || *x > p - 1u32 {
        return Err(Error::InvalidParameter(format!(
            "{what} = {x} outside [1, {}]",
            p - 1u32
        )));
    }
    Ok(())
}

pub fn dh_exchange(params: &DhParams, e: &BigUint, d: &BigUint) -> Result<DhTranscript> {
    let p = &params.p;
    check_exponent(e, p, "e")?;
    check_exponent(d, p, "d")?;
    let c_e = mod_pow(&params.m, e, p)?;
    let c_d = mod_pow(&params.m, d, p)?;
    let c_ed = mod_pow(&c_e, d, p)?;
    let c_de = mod_pow(&c_d, e, p)?;
    if c_ed != c_de {
        return Err(Error::Internal(format!("shared secrets differ: {c_ed} vs {c_de}")));
    }
    Ok(DhTranscript {
        params: params.clone(),
        e: e.clone(),
        d: d.clone(),
        c_e,
        c_d,
        c_ed,
    })
}

/// Walks the base orbit until it reaches `c`; returns the step in `[1, p-1]`.
pub fn discrete_log_bruteforce(c: &BigUint, params: &DhParams) -> Result<BigUint> {
    let p = &params.p;
    check_exponent(c, p, "c")?;
    let mut x = BigUint::one();
    let mut k = BigUint::zero();
    loop {
        x = &x * &params.m % p;
        k += 1u32;
        if x == *c {
            return Ok(k);
        }
        if k >= p - 1u32 {
            return Err(Error::Internal(format!("{c} not on the orbit of {}", params.m)));
        }
    }
}

/// A common state of the `c_d`- and `c_e`-systems at steps `e` and `d`
/// that also equals the base state at step `e·d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Intersection {
    #[serde(serialize_with = "crate::io::ser_display")]
    pub secret: BigUint,
    #[serde(serialize_with = "crate::io::ser_display")]
    pub e: BigUint,
    #[serde(serialize_with = "crate::io::ser_display")]
    pub d: BigUint,
}

/// Pairs `(e, d)` in lexicographic order where the `c_d`-system at step `e`
/// and the `c_e`-system at step `d` meet in a value equal to `m^{e·d}`.
///
/// This test alone does not identify the shared secret: when `e` or `d`
/// shares a factor with `p - 1`, pairs other than the protocol's exponents
/// can pass it with a different common value (for `p = 7, m = 3`,
/// `c_e = 5, c_d = 3` the first passing pair is `(2, 4)` with value 2, while
/// the secret is 5).
pub fn intersection_candidates(
    c_e: &BigUint,
    c_d: &BigUint,
    params: &DhParams,
) -> Result<Vec<Intersection>> {
    let p = &params.p;
    check_exponent(c_e, p, "c_e")?;
    check_exponent(c_d, p, "c_d")?;
    let n = params.period()?;
    let eta = simulate(c_e, params, &BigUint::one(), n)?;
    let zeta = simulate(c_d, params, &BigUint::one(), n)?;
    let mut out = Vec::new();
    for e in 1..=n {
        let y = &zeta.values[e];
        for d in 1..=n {
            if eta.values[d] != *y {
                continue;
            }
            let ed = BigUint::from(e) * BigUint::from(d);
            if mod_pow(&params.m, &ed, p)? == *y {
                out.push(Intersection {
                    secret: y.clone(),
                    e: e.into(),
                    d: d.into(),
                });
            }
        }
    }
    Ok(out)
}

/// Brute-force intersection of the trajectories `y_{k+1} = c_d y_k` and
/// `η_{k+1} = c_e η_k` (both from 1) at steps `e` and `d`, with the common
/// value equal to the base state `x_{e·d}`.
///
/// A candidate is accepted only if the base orbit also passes through `c_e`
/// at step `e` and `c_d` at step `d`; without that, the `x_{e·d}` test admits
/// spurious pairs (see [`intersection_candidates`]). The accepted pair is
/// unique in `[1, p-1]²`, so the lexicographic scan order does not affect
/// the result.
pub fn shared_secret_intersection(
    c_e: &BigUint,
    c_d: &BigUint,
    params: &DhParams,
) -> Result<Intersection> {
    let p = &params.p;
    check_exponent(c_e, p, "c_e")?;
    check_exponent(c_d, p, "c_d")?;
    let n = params.period()?;
    let base = params.base_trajectory()?;
    let eta = simulate(c_e, params, &BigUint::one(), n)?;
    let zeta = simulate(c_d, params, &BigUint::one(), n)?;
    for e in 1..=n {
        let y = &zeta.values[e];
        if base.values[e] != *c_e {
            continue;
        }
        for d in 1..=n {
            if eta.values[d] != *y || base.values[d] != *c_d {
                continue;
            }
            let ed = BigUint::from(e) * BigUint::from(d);
            if mod_pow(&params.m, &ed, p)? == *y {
                return Ok(Intersection {
                    secret: y.clone(),
                    e: e.into(),
                    d: d.into(),
                });
            }
        }
    }
    Err(Error::Internal("no trajectory intersection found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn vals(t: &ModTrajectory) -> Vec<u64> {
        t.values().iter().map(|v| v.to_u64().unwrap()).collect()
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&u(3), &u(4), &u(7)).unwrap(), u(4));
        assert_eq!(mod_pow(&u(5), &u(0), &u(23)).unwrap(), u(1));
        assert_eq!(mod_pow(&u(5), &u(22), &u(23)).unwrap(), u(1));
        assert!(mod_pow(&u(3), &u(4), &u(1)).is_err());
    }

    #[test]
    fn mod_pow_matches_repeated_multiplication() {
        for p in [2u64, 7, 23, 97] {
            for b in 0..p + 3 {
                let mut acc = 1 % p;
                for e in 0..40u64 {
                    assert_eq!(mod_pow(&u(b), &u(e), &u(p)).unwrap(), u(acc), "{b}^{e} mod {p}");
                    acc = acc * b % p;
                }
            }
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert!(is_primitive_root(&u(2), &u(5)).unwrap());
        assert!(!is_primitive_root(&u(4), &u(5)).unwrap());
        assert!(is_primitive_root(&u(3), &u(7)).unwrap());
        assert!(matches!(is_primitive_root(&u(2), &u(9)), Err(Error::NotPrime(_))));
    }

    #[test]
    fn smallest_roots() {
        assert_eq!(find_primitive_root(&u(5)).unwrap(), u(2));
        assert_eq!(find_primitive_root(&u(7)).unwrap(), u(3));
        assert_eq!(find_primitive_root(&u(23)).unwrap(), u(5));
        assert!(find_primitive_root(&u(21)).is_err());
    }

    #[test]
    fn primitive_root_count_is_totient() {
        // φ(p-1) roots
        assert_eq!(primitive_roots(&u(23)).unwrap().len(), 10);
        assert_eq!(primitive_roots(&u(61)).unwrap().len(), 16);
    }

    #[test]
    fn params_validation() {
        assert!(DhParams::new(7u32, 3u32).is_ok());
        assert!(matches!(DhParams::new(7u32, 2u32), Err(Error::NotPrimitiveRoot { .. })));
        assert!(DhParams::new(3u32, 2u32).is_err());
        assert!(DhParams::new(9u32, 2u32).is_err());
        assert!(DhParams::new(7u32, 7u32).is_err());
    }

    #[test]
    fn simulate_examples() {
        let p5 = DhParams::new(5u32, 2u32).unwrap();
        let p7 = DhParams::new(7u32, 3u32).unwrap();
        assert_eq!(vals(&simulate(&u(2), &p5, &u(1), 4).unwrap()), [1, 2, 4, 3, 1]);
        assert_eq!(vals(&simulate(&u(3), &p7, &u(1), 6).unwrap()), [1, 3, 2, 6, 4, 5, 1]);
        assert_eq!(vals(&simulate(&u(3), &p7, &u(1), 0).unwrap()), [1]);
        assert!(simulate(&u(3), &p7, &u(0), 3).is_err());
        assert!(simulate(&u(7), &p7, &u(1), 3).is_err());
    }

    #[test]
    fn state_extends_past_horizon() {
        let p7 = DhParams::new(7u32, 3u32).unwrap();
        let t = simulate(&u(3), &p7, &u(1), 2).unwrap();
        let full = simulate(&u(3), &p7, &u(1), 20).unwrap();
        for k in 0..=20 {
            assert_eq!(t.state(k), full.values()[k]);
        }
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_criterion(&u(2), &u(7)).unwrap(), Residuosity::Residue);
        assert_eq!(euler_criterion(&u(3), &u(7)).unwrap(), Residuosity::NonResidue);
        assert_eq!(euler_criterion(&u(1), &u(23)).unwrap().sign(), 1);
        assert!(euler_criterion(&u(14), &u(7)).is_err());
    }

    #[test]
    fn exchange_examples() {
        let p7 = DhParams::new(7u32, 3u32).unwrap();
        let t = dh_exchange(&p7, &u(2), &u(5)).unwrap();
        assert_eq!((t.c_e, t.c_d, t.c_ed), (u(2), u(5), u(4)));
        let t = dh_exchange(&p7, &u(1), &u(1)).unwrap();
        assert_eq!((t.c_e, t.c_d, t.c_ed), (u(3), u(3), u(3)));
        let p5 = DhParams::new(5u32, 2u32).unwrap();
        let t = dh_exchange(&p5, &u(3), &u(2)).unwrap();
        assert_eq!((t.c_e, t.c_d, t.c_ed), (u(3), u(4), u(4)));
        assert!(dh_exchange(&p5, &u(0), &u(2)).is_err());
        assert!(dh_exchange(&p5, &u(5), &u(2)).is_err());
    }

    #[test]
    fn discrete_log_examples() {
        let p7 = DhParams::new(7u32, 3u32).unwrap();
        assert_eq!(discrete_log_bruteforce(&u(4), &p7).unwrap(), u(4));
        assert_eq!(discrete_log_bruteforce(&u(3), &p7).unwrap(), u(1));
        assert_eq!(discrete_log_bruteforce(&u(1), &p7).unwrap(), u(6));
        assert!(discrete_log_bruteforce(&u(0), &p7).is_err());
    }

    #[test]
    fn intersection_examples() {
        let p7 = DhParams::new(7u32, 3u32).unwrap();
        let hit = shared_secret_intersection(&u(2), &u(5), &p7).unwrap();
        assert_eq!((hit.secret, hit.e, hit.d), (u(4), u(2), u(5)));

        let hit = shared_secret_intersection(&u(3), &u(3), &p7).unwrap();
        assert_eq!((hit.secret, hit.e, hit.d), (u(3), u(1), u(1)));

        let p5 = DhParams::new(5u32, 2u32).unwrap();
        let hit = shared_secret_intersection(&u(3), &u(4), &p5).unwrap();
        assert_eq!((hit.secret, hit.e, hit.d), (u(4), u(3), u(2)));
    }

    #[test]
    fn value_test_alone_admits_wrong_secrets() {
        let p7 = DhParams::new(7u32, 3u32).unwrap();
        // e = 5, d = 1: c_e = 5, c_d = 3, secret 5
        let cands = intersection_candidates(&u(5), &u(3), &p7).unwrap();
        assert_eq!((cands[0].secret.clone(), cands[0].e.clone(), cands[0].d.clone()), (u(2), u(2), u(4)));
        assert!(cands.iter().any(|c| c.secret == u(5)));
        let hit = shared_secret_intersection(&u(5), &u(3), &p7).unwrap();
        assert_eq!((hit.secret, hit.e, hit.d), (u(5), u(5), u(1)));
    }
}
