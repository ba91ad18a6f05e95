//! Jacobi elliptic functions sn, cn, dn for real argument and modulus m in [0, 1].
//!
//! Uses the descending Landen transformation driven by the arithmetic-geometric
//! mean. The m = 1 limit is handled analytically (cn = dn = sech, sn = tanh)
//! because the AGM sequence degenerates there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const AGM_MAX_DEPTH: usize = 32;
const AGM_TOL: f64 = 1e-15;
const SECH_BRANCH: f64 = 1e-12;

/// Elliptic modulus `m` (parameter convention, `k^2 = m`), restricted to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EllipticModulus(f64);

impl TryFrom<f64> for EllipticModulus {
    type Error = Error;
    fn try_from(m: f64) -> Result<Self> {
        Self::new(m)
    }
}

impl From<EllipticModulus> for f64 {
    fn from(m: EllipticModulus) -> f64 {
        m.0
    }
}

impl EllipticModulus {
    pub const ZERO: EllipticModulus = EllipticModulus(0.0);
    pub const ONE: EllipticModulus = EllipticModulus(1.0);

    pub fn new(m: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&m) {
            Ok(Self(m))
        } else {
            Err(Error::Domain(format!("elliptic modulus m = {m} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// sn, cn and dn from a single AGM pass.
pub fn jacobi_sncndn(u: f64, m: EllipticModulus) -> JacobiTriple {
    let m = m.value();
    if 1.0 - m < SECH_BRANCH {
        let sech = 1.0 / u.cosh();
        return JacobiTriple {
            sn: u.tanh(),
            cn: sech,
            dn: sech,
        };
    }
    if m == 0.0 {
        let (sn, cn) = u.sin_cos();
        return JacobiTriple { sn, cn, dn: 1.0 };
    }

    let mut a = [0.0; AGM_MAX_DEPTH + 1];
    let mut c = [0.0; AGM_MAX_DEPTH + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut n = 0;
    while n < AGM_MAX_DEPTH && c[n].abs() > AGM_TOL {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
    }

    // amplitude phi_N = 2^N a_N u, then climb back down
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (1.0 - m * sn * sn).max(0.0).sqrt();
    JacobiTriple { sn, cn, dn }
}

/// Jacobi cn(u | m).
pub fn jacobi_cn(u: f64, m: EllipticModulus) -> f64 {
    jacobi_sncndn(u, m).cn
}

#[cfg(test)]
mod tests {
    use super::*;

    // Complete elliptic integral K(m) by brute-force composite Simpson on
    // int_0^{pi/2} (1 - m sin^2 x)^{-1/2} dx. Kept separate from the AGM path.
    fn complete_k_simpson(m: f64) -> f64 {
        let n = 20_000;
        let h = std::f64::consts::FRAC_PI_2 / n as f64;
        let f = |x: f64| 1.0 / (1.0 - m * x.sin().powi(2)).sqrt();
        let mut s = f(0.0) + f(std::f64::consts::FRAC_PI_2);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    fn m(v: f64) -> EllipticModulus {
        EllipticModulus::new(v).unwrap()
    }

    #[test]
    fn cn_at_zero_is_one() {
        for mv in [0.0, 0.1, 0.5, 0.9, 1.0] {
            assert_eq!(jacobi_cn(0.0, m(mv)), 1.0);
        }
    }

    #[test]
    fn cn_at_unit_modulus_is_sech() {
        let expected = 0.265_802_228_834_079_7; // sech(2)
        assert!((jacobi_cn(2.0, EllipticModulus::ONE) - expected).abs() < 1e-15);
    }

    #[test]
    fn cn_vanishes_at_quarter_period() {
        let k = complete_k_simpson(0.5);
        // frozen reference value for K(0.5)
        assert!((k - 1.854_074_677_301_372).abs() < 1e-12);
        assert!(jacobi_cn(k, m(0.5)).abs() < 1e-12);
    }

    #[test]
    fn cn_at_zero_modulus_is_cosine() {
        for i in -200..=200 {
            let u = i as f64 * 0.1;
            assert!((jacobi_cn(u, m(0.0)) - u.cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn pythagorean_identity() {
        for mv in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for i in -400..=400 {
                let u = i as f64 * 0.05;
                let j = jacobi_sncndn(u, m(mv));
                assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-11, "m={mv} u={u}");
                assert!((j.dn * j.dn + mv * j.sn * j.sn - 1.0).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn near_unit_modulus_matches_sech() {
        let mm = m(1.0 - 1e-10);
        for i in -500..=500 {
            let u = i as f64 * 0.01;
            assert!((jacobi_cn(u, mm) - 1.0 / u.cosh()).abs() < 1e-5);
        }
    }

    #[test]
    fn large_argument_periodicity() {
        // cn has real period 4K
        let k = complete_k_simpson(0.75);
        let mm = m(0.75);
        for u in [0.3, 1.7, -2.2] {
            let shifted = u + 8.0 * k;
            assert!((jacobi_cn(u, mm) - jacobi_cn(shifted, mm)).abs() < 1e-12);
        }
        assert!(jacobi_cn(50.0, mm).is_finite());
    }

    #[test]
    fn rejects_modulus_outside_unit_interval() {
        assert!(EllipticModulus::new(1.5).is_err());
        assert!(EllipticModulus::new(-0.1).is_err());
    }
}
