use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Complex protocol parameter kept together with its polar form.
///
/// The phase lies in (-π, π]; a zero modulus forces phase 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarParam {
    value: Complex64,
    modulus: f64,
    phase: f64,
}

fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    // rem_euclid maps -π to π already; this catches the 2π - tiny case
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

impl PolarParam {
    pub fn new(value: Complex64) -> Self {
        let modulus = value.norm();
        if modulus == 0.0 {
            return Self::zero();
        }
        let mut phase = value.arg();
        if phase == -PI {
            phase = PI;
        }
        Self {
            value,
            modulus,
            phase,
        }
    }

    pub fn cartesian(re: f64, im: f64) -> Self {
        Self::new(Complex64::new(re, im))
    }

    /// Builds `modulus * e^{i phase}`. A negative modulus is folded into the phase.
    pub fn polar(modulus: f64, phase: f64) -> Self {
        if modulus == 0.0 {
            return Self::zero();
        }
        let (modulus, phase) = if modulus < 0.0 {
            (-modulus, phase + PI)
        } else {
            (modulus, phase)
        };
        let phase = wrap_phase(phase);
        Self {
            value: Complex64::from_polar(modulus, phase),
            modulus,
            phase,
        }
    }

    pub fn real(x: f64) -> Self {
        Self::cartesian(x, 0.0)
    }

    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            modulus: 0.0,
            phase: 0.0,
        }
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn conj(&self) -> Self {
        Self::new(self.value.conj())
    }

    pub fn is_zero(&self) -> bool {
        self.modulus == 0.0
    }

    /// `e^{i phase}`, equal to 1 for the zero parameter.
    pub fn unit(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, self.phase)
        }
    }
}

impl Default for PolarParam {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Complex64> for PolarParam {
    fn from(value: Complex64) -> Self {
        Self::new(value)
    }
}

impl fmt::Display for PolarParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.modulus, self.phase)
    }
}

/// Parses `"re,im"`, `"mod@phase"` or a bare real number. Components must
/// be finite.
impl FromStr for PolarParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let number = |part: &str| -> Result<f64, Error> {
            let x: f64 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {part:?} in {s:?}")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::NonFinite)
            }
        };
        if let Some((m, p)) = s.split_once('@') {
            let modulus = number(m)?;
            if modulus < 0.0 {
                return Err(Error::Parse(format!("negative modulus in {s:?}")));
            }
            Ok(Self::polar(modulus, number(p)?))
        } else if let Some((re, im)) = s.split_once(',') {
            Ok(Self::cartesian(number(re)?, number(im)?))
        } else {
            Ok(Self::real(number(s)?))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Cartesian {
    re: f64,
    im: f64,
}

impl Serialize for PolarParam {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Cartesian {
            re: self.value.re,
            im: self.value.im,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolarParam {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let c = Cartesian::deserialize(deserializer)?;
        Ok(Self::cartesian(c.re, c.im))
    }
}

/// Serializes a complex number as `{"re": .., "im": ..}`, matching [`PolarParam`].
pub fn serialize_complex<S: Serializer>(
    z: &Complex64,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    Cartesian { re: z.re, im: z.im }.serialize(serializer)
}

/// `sin(x)/x` with the Taylor limit near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sinh(x)/x` with the Taylor limit near zero.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_both_notations() {
        assert_eq!("1,0".parse::<PolarParam>().unwrap(), PolarParam::real(1.0));
        assert_eq!(
            " -0.5 , 2 ".parse::<PolarParam>().unwrap(),
            PolarParam::cartesian(-0.5, 2.0)
        );
        assert_eq!(
            "2@0.5".parse::<PolarParam>().unwrap(),
            PolarParam::polar(2.0, 0.5)
        );
        assert_eq!(
            "0.25".parse::<PolarParam>().unwrap(),
            PolarParam::real(0.25)
        );
        for bad in ["", "1,", "x@1", "-1@0", "inf,0", "1,2,3"] {
            assert!(bad.parse::<PolarParam>().is_err(), "{bad}");
        }
    }

    #[test]
    fn zero_modulus_has_zero_phase() {
        let p = PolarParam::polar(0.0, 2.0);
        assert_eq!(p.phase(), 0.0);
        assert_eq!(PolarParam::cartesian(0.0, 0.0).phase(), 0.0);
        assert_eq!(PolarParam::cartesian(-0.0, 0.0).phase(), 0.0);
    }

    #[test]
    fn negative_real_axis_maps_to_pi() {
        assert_eq!(PolarParam::real(-1.0).phase(), PI);
        assert!((PolarParam::polar(1.0, -PI).phase() - PI).abs() < 1e-15);
        assert!((PolarParam::polar(2.0, 3.0 * PI).phase() - PI).abs() < 1e-12);
    }

    #[test]
    fn negative_modulus_folds_into_phase() {
        let p = PolarParam::polar(-2.0, 0.0);
        assert_eq!(p.modulus(), 2.0);
        assert!((p.value() - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn removable_singularities() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinhc(0.0), 1.0);
        assert!((sinc(1e-9) - 1.0).abs() < 1e-16);
        assert!((sinc(0.5) - 0.5f64.sin() / 0.5).abs() < 1e-16);
        assert!((sinhc(0.5) - 0.5f64.sinh() / 0.5).abs() < 1e-16);
    }

    #[test]
    fn serializes_as_cartesian() {
        let p = PolarParam::cartesian(0.5, -1.25);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"re":0.5,"im":-1.25}"#);
        let back: PolarParam = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        #[test]
        fn polar_form_is_consistent(re in -10.0..10.0f64, im in -10.0..10.0f64) {
            let p = PolarParam::cartesian(re, im);
            let rebuilt = Complex64::from_polar(p.modulus(), p.phase());
            let scale = p.modulus().max(1e-300);
            prop_assert!((rebuilt - p.value()).norm() / scale <= 1e-14);
            prop_assert!(p.phase() > -PI && p.phase() <= PI);
            prop_assert!(p.modulus() >= 0.0);
        }

        #[test]
        fn polar_constructor_wraps(r in 0.0..5.0f64, theta in -20.0..20.0f64) {
            let p = PolarParam::polar(r, theta);
            prop_assert!(p.phase() > -PI && p.phase() <= PI);
            let direct = Complex64::from_polar(r, theta);
            prop_assert!((direct - p.value()).norm() <= 1e-13 * r.max(1.0));
        }
    }
}
