//! Coefficient rings: integers, rationals and prime fields. Mixing rings is
//! an error, never a coercion.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{pre, Error, Result};
use crate::linalg::{inv_mod, is_prime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RingSpec {
    Z,
    Q,
    Fp(u64),
}

impl RingSpec {
    pub fn fp(p: u64) -> Result<RingSpec> {
        if is_prime(p) {
            Ok(RingSpec::Fp(p))
        } else {
            Err(pre!("{p} is not prime"))
        }
    }

    pub fn tag(&self) -> String {
        match self {
            RingSpec::Z => "Z".into(),
            RingSpec::Q => "Q".into(),
            RingSpec::Fp(p) => format!("F{p}"),
        }
    }

    pub fn parse(s: &str) -> Result<RingSpec> {
        match s {
            "Z" => Ok(RingSpec::Z),
            "Q" => Ok(RingSpec::Q),
            _ => {
                let p = s
                    .strip_prefix("F")
                    .or_else(|| s.strip_prefix("Fp"))
                    .and_then(|x| x.parse::<u64>().ok())
                    .ok_or_else(|| Error::Format(format!("unknown ring tag '{s}'")))?;
                RingSpec::fp(p)
            }
        }
    }

    pub fn zero(&self) -> Coeff {
        self.from_i64(0)
    }

    pub fn one(&self) -> Coeff {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Coeff {
        match self {
            RingSpec::Z => Coeff::Z(BigInt::from(v)),
            RingSpec::Q => Coeff::Q(BigRational::from_integer(BigInt::from(v))),
            RingSpec::Fp(p) => Coeff::Fp(v.rem_euclid(*p as i64) as u64, *p),
        }
    }

    /// Parses an exact decimal string (`"3"`, `"-2/5"`) in this ring.
    pub fn parse_coeff(&self, s: &str) -> Result<Coeff> {
        let bad = || Error::Format(format!("cannot parse coefficient '{s}' in {}", self.tag()));
        match self {
            RingSpec::Z => BigInt::from_str(s).map(Coeff::Z).map_err(|_| bad()),
            RingSpec::Q => {
                if let Some((n, d)) = s.split_once('/') {
                    let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                    let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                    if d.is_zero() {
                        return Err(bad());
                    }
                    Ok(Coeff::Q(BigRational::new(n, d)))
                } else {
                    BigInt::from_str(s).map(|n| Coeff::Q(BigRational::from_integer(n))).map_err(|_| bad())
                }
            }
            RingSpec::Fp(p) => {
                let v = BigInt::from_str(s).map_err(|_| bad())?;
                let r = ((v % BigInt::from(*p)) + BigInt::from(*p)) % BigInt::from(*p);
                Ok(Coeff::Fp(r.to_u64().ok_or_else(bad)?, *p))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coeff {
    Z(BigInt),
    Q(BigRational),
    /// Value and modulus.
    Fp(u64, u64),
}

impl Coeff {
    pub fn ring(&self) -> RingSpec {
        match self {
            Coeff::Z(_) => RingSpec::Z,
            Coeff::Q(_) => RingSpec::Q,
            Coeff::Fp(_, p) => RingSpec::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Z(x) => x.is_zero(),
            Coeff::Q(x) => x.is_zero(),
            Coeff::Fp(x, _) => *x == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Z(x) => x.is_one(),
            Coeff::Q(x) => x.is_one(),
            Coeff::Fp(x, _) => *x == 1,
        }
    }

    fn mismatch(&self, other: &Coeff) -> Error {
        pre!("ring mismatch: {} vs {}", self.ring().tag(), other.ring().tag())
    }

    pub fn add(&self, other: &Coeff) -> Result<Coeff> {
        match (self, other) {
            (Coeff::Z(a), Coeff::Z(b)) => Ok(Coeff::Z(a + b)),
            (Coeff::Q(a), Coeff::Q(b)) => Ok(Coeff::Q(a + b)),
            (Coeff::Fp(a, p), Coeff::Fp(b, q)) if p == q => Ok(Coeff::Fp((a + b) % p, *p)),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn mul(&self, other: &Coeff) -> Result<Coeff> {
        match (self, other) {
            (Coeff::Z(a), Coeff::Z(b)) => Ok(Coeff::Z(a * b)),
            (Coeff::Q(a), Coeff::Q(b)) => Ok(Coeff::Q(a * b)),
            (Coeff::Fp(a, p), Coeff::Fp(b, q)) if p == q => Ok(Coeff::Fp(((*a as u128 * *b as u128) % *p as u128) as u64, *p)),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Z(a) => Coeff::Z(-a),
            Coeff::Q(a) => Coeff::Q(-a),
            Coeff::Fp(a, p) => Coeff::Fp((p - a) % p, *p),
        }
    }

    /// Multiplicative inverse where it exists (units of Z, nonzero rationals,
    /// nonzero elements of F_p).
    pub fn inverse(&self) -> Option<Coeff> {
        match self {
            Coeff::Z(a) if a.abs().is_one() => Some(self.clone()),
            Coeff::Z(_) => None,
            Coeff::Q(a) if !a.is_zero() => Some(Coeff::Q(a.recip())),
            Coeff::Q(_) => None,
            Coeff::Fp(a, p) => inv_mod(*a, *p).map(|i| Coeff::Fp(i, *p)),
        }
    }

    /// Exact integer value, if the coefficient is an integer (or an F_p
    /// residue, returned as its least nonnegative representative).
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Coeff::Z(a) => a.to_i64(),
            Coeff::Q(a) if a.is_integer() => a.to_integer().to_i64(),
            Coeff::Q(_) => None,
            Coeff::Fp(a, _) => Some(*a as i64),
        }
    }

    pub fn residue(&self, p: u64) -> Option<u64> {
        match self {
            Coeff::Z(a) => {
                let r = a % BigInt::from(p);
                let r = if r.is_negative() { r + BigInt::from(p) } else { r };
                r.to_u64()
            }
            Coeff::Q(a) => {
                let n = Coeff::Z(a.numer().clone()).residue(p)?;
                let d = Coeff::Z(a.denom().clone()).residue(p)?;
                inv_mod(d, p).map(|i| (n as u128 * i as u128 % p as u128) as u64)
            }
            Coeff::Fp(a, q) if *q == p => Some(*a),
            Coeff::Fp(..) => None,
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Z(a) => write!(f, "{a}"),
            Coeff::Q(a) => {
                if a.is_integer() {
                    write!(f, "{}", a.numer())
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())
                }
            }
            Coeff::Fp(a, _) => write!(f, "{a}"),
        }
    }
}

impl Coeff {
    pub fn to_decimal(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let z = RingSpec::Z;
        assert_eq!(z.from_i64(2).add(&z.from_i64(-5)).unwrap(), z.from_i64(-3));
        let q = RingSpec::Q;
        let half = q.parse_coeff("1/2").unwrap();
        assert_eq!(half.add(&half).unwrap(), q.one());
        let f5 = RingSpec::fp(5).unwrap();
        assert_eq!(f5.from_i64(-1).to_string(), "4");
        assert_eq!(f5.from_i64(3).inverse().unwrap(), f5.from_i64(2));
        assert!(z.one().add(&q.one()).is_err());
        assert!(RingSpec::fp(6).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        for (r, s) in [(RingSpec::Z, "-12"), (RingSpec::Q, "-3/7"), (RingSpec::Fp(7), "5")] {
            assert_eq!(r.parse_coeff(s).unwrap().to_string(), s);
        }
        assert_eq!(RingSpec::parse("F7").unwrap(), RingSpec::Fp(7));
        assert!(RingSpec::parse("R").is_err());
    }
}
