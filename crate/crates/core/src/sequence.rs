//! Phase codes and the classical starting-code generators.
//!
//! A sequence is always stored as phases (continuous alphabet) or as integer
//! phase indices `j` with `phi = 2 pi j / M` (M-ary alphabet), never as complex
//! samples, so `|x_i| = 1` and alphabet membership hold exactly.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    Continuous,
    /// `M` equispaced phases; `Discrete(2)` is the binary alphabet.
    Discrete(u32),
}

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet::Discrete(2);

    pub fn is_binary(&self) -> bool {
        matches!(self, Alphabet::Discrete(2))
    }

    pub fn size(&self) -> Option<u32> {
        match self {
            Alphabet::Continuous => None,
            Alphabet::Discrete(m) => Some(*m),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Alphabet::Discrete(m) if *m < 2 => Err(Error::InvalidConfig(format!(
                "alphabet size must be at least 2, got {m}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Continuous => write!(f, "continuous"),
            Alphabet::Discrete(2) => write!(f, "binary"),
            Alphabet::Discrete(m) => write!(f, "m:{m}"),
        }
    }
}

impl FromStr for Alphabet {
    type Err = Error;

    /// Accepts `continuous`, `binary` or `m:<M>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let alphabet = match s {
            "continuous" | "inf" => Alphabet::Continuous,
            "binary" => Alphabet::BINARY,
            _ => {
                let m = s
                    .strip_prefix("m:")
                    .or_else(|| s.strip_prefix("M:"))
                    .and_then(|v| v.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "unknown alphabet `{s}` (expected continuous, binary or m:<M>)"
                        ))
                    })?;
                Alphabet::Discrete(m)
            }
        };
        alphabet.validate()?;
        Ok(alphabet)
    }
}

/// `exp(j 2 pi index / m)`, exact at the quarter-circle points so binary and
/// quaternary codes have integer-valued entries.
pub fn unit_root(index: u32, m: u32) -> Complex64 {
    let j = u64::from(index % m);
    let m64 = u64::from(m);
    if j == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * j == m64 {
        Complex64::new(-1.0, 0.0)
    } else if 4 * j == m64 {
        Complex64::new(0.0, 1.0)
    } else if 4 * j == 3 * m64 {
        Complex64::new(0.0, -1.0)
    } else {
        let (s, c) = (TAU * j as f64 / m as f64).sin_cos();
        Complex64::new(c, s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Continuous(Vec<f64>),
    Discrete { m: u32, indices: Vec<u32> },
}

/// A length-`N` constant-modulus code.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSequence {
    repr: Repr,
}

impl PhaseSequence {
    pub fn continuous(phases: Vec<f64>) -> Result<Self> {
        check_len(phases.len())?;
        if let Some(i) = phases.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidSequence(format!("phase {i} is not finite")));
        }
        Ok(Self {
            repr: Repr::Continuous(phases),
        })
    }

    pub fn discrete(m: u32, indices: Vec<u32>) -> Result<Self> {
        check_len(indices.len())?;
        Alphabet::Discrete(m).validate()?;
        if let Some(i) = indices.iter().position(|&j| j >= m) {
            return Err(Error::InvalidSequence(format!(
                "index {} at position {i} is outside the alphabet of size {m}",
                indices[i]
            )));
        }
        Ok(Self {
            repr: Repr::Discrete { m, indices },
        })
    }

    /// Binary code from signs (`+1` -> index 0, `-1` -> index 1).
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let indices = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(0),
                -1 => Ok(1),
                other => Err(Error::InvalidSequence(format!("sign {other} is not +-1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::discrete(2, indices)
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Continuous(p) => p.len(),
            Repr::Discrete { indices, .. } => indices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphabet(&self) -> Alphabet {
        match &self.repr {
            Repr::Continuous(_) => Alphabet::Continuous,
            Repr::Discrete { m, .. } => Alphabet::Discrete(*m),
        }
    }

    pub fn phase(&self, i: usize) -> f64 {
        match &self.repr {
            Repr::Continuous(p) => p[i],
            Repr::Discrete { m, indices } => TAU * f64::from(indices[i]) / f64::from(*m),
        }
    }

    pub fn phases(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.phase(i)).collect()
    }

    pub fn indices(&self) -> Option<&[u32]> {
        match &self.repr {
            Repr::Continuous(_) => None,
            Repr::Discrete { indices, .. } => Some(indices),
        }
    }

    pub fn entry(&self, i: usize) -> Complex64 {
        match &self.repr {
            Repr::Continuous(p) => Complex64::from_polar(1.0, p[i]),
            Repr::Discrete { m, indices } => unit_root(indices[i], *m),
        }
    }

    pub fn entries(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.entry(i)).collect()
    }

    pub fn set_phase(&mut self, i: usize, phase: f64) -> Result<()> {
        let n = self.len();
        match &mut self.repr {
            Repr::Continuous(p) if i < n => {
                p[i] = phase;
                Ok(())
            }
            Repr::Continuous(_) => Err(Error::IndexOutOfRange { index: i, len: n }),
            Repr::Discrete { m, .. } => Err(Error::AlphabetMismatch {
                expected: "continuous".into(),
                found: Alphabet::Discrete(*m).to_string(),
            }),
        }
    }

    pub fn set_index(&mut self, i: usize, index: u32) -> Result<()> {
        let n = self.len();
        match &mut self.repr {
            Repr::Discrete { m, indices } => {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, len: n });
                }
                if index >= *m {
                    return Err(Error::InvalidSequence(format!(
                        "index {index} outside alphabet of size {m}"
                    )));
                }
                indices[i] = index;
                Ok(())
            }
            Repr::Continuous(_) => Err(Error::AlphabetMismatch {
                expected: "discrete".into(),
                found: "continuous".into(),
            }),
        }
    }

    /// Re-expresses the code on the continuous alphabet (same phases).
    pub fn to_continuous(&self) -> PhaseSequence {
        PhaseSequence {
            repr: Repr::Continuous(self.phases()),
        }
    }

    /// Nearest-point quantization onto `alphabet`.
    pub fn quantize(&self, alphabet: Alphabet) -> Result<PhaseSequence> {
        alphabet.validate()?;
        match alphabet {
            Alphabet::Continuous => Ok(self.to_continuous()),
            Alphabet::Discrete(m) => {
                let indices = self
                    .phases()
                    .iter()
                    .map(|&p| quantize_phase(p, m))
                    .collect();
                PhaseSequence::discrete(m, indices)
            }
        }
    }

    pub fn to_json_value(&self) -> Value {
        let alphabet = match self.alphabet() {
            Alphabet::Continuous => json!("continuous"),
            Alphabet::Discrete(m) => json!({ "discrete": m }),
        };
        let mut obj = json!({
            "n": self.len(),
            "alphabet": alphabet,
            "phases": self.phases(),
        });
        if let Some(indices) = self.indices() {
            obj["indices"] = json!(indices);
        }
        obj
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("sequence serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::schema("<root>", format!("malformed JSON: {e}")))?;
        Self::from_json_value(&value)
    }

    /// Parses the sequence file schema; errors name the offending field.
    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::schema("<root>", "expected a JSON object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::schema("n", "missing or not a non-negative integer"))?
            as usize;
        let alphabet = match obj.get("alphabet") {
            Some(Value::String(s)) if s == "continuous" => Alphabet::Continuous,
            Some(Value::String(s)) if s == "binary" => Alphabet::BINARY,
            Some(Value::Object(o)) => {
                let m = o
                    .get("discrete")
                    .and_then(Value::as_u64)
                    .filter(|&m| (2..=u64::from(u32::MAX)).contains(&m))
                    .ok_or_else(|| {
                        Error::schema("alphabet", "expected {\"discrete\": M} with M >= 2")
                    })?;
                Alphabet::Discrete(m as u32)
            }
            _ => {
                return Err(Error::schema(
                    "alphabet",
                    "expected \"continuous\" or {\"discrete\": M}",
                ))
            }
        };
        let phases = obj
            .get("phases")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::schema("phases", "missing or not an array"))?
            .iter()
            .map(|v| v.as_f64().filter(|p| p.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::schema("phases", "entries must be finite numbers"))?;
        if phases.len() != n {
            return Err(Error::schema(
                "phases",
                format!("length {} does not match n = {n}", phases.len()),
            ));
        }
        if n < 2 {
            return Err(Error::schema("n", "code length must be at least 2"));
        }
        match alphabet {
            Alphabet::Continuous => PhaseSequence::continuous(phases),
            Alphabet::Discrete(m) => {
                let indices = obj
                    .get("indices")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::schema("indices", "required for discrete alphabets"))?
                    .iter()
                    .map(|v| v.as_u64().filter(|&j| j < u64::from(m)).map(|j| j as u32))
                    .collect::<Option<Vec<u32>>>()
                    .ok_or_else(|| {
                        Error::schema("indices", format!("entries must be integers in [0, {m})"))
                    })?;
                if indices.len() != n {
                    return Err(Error::schema(
                        "indices",
                        format!("length {} does not match n = {n}", indices.len()),
                    ));
                }
                for (i, (&j, &p)) in indices.iter().zip(&phases).enumerate() {
                    let expected = TAU * f64::from(j) / f64::from(m);
                    if wrapped_distance(p, expected) > 1e-9 {
                        return Err(Error::schema(
                            "phases",
                            format!("phase {i} = {p} disagrees with index {j}"),
                        ));
                    }
                }
                PhaseSequence::discrete(m, indices)
            }
        }
    }
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidSequence(format!(
            "code length must be at least 2, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn wrapped_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn quantize_phase(phase: f64, m: u32) -> u32 {
    let scaled = phase.rem_euclid(TAU) * f64::from(m) / TAU;
    (scaled.round() as u64 % u64::from(m)) as u32
}

/// Starting-code families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `phi = (2 pi / L) m n`, `m, n = 0..L-1` row-major; needs `N = L^2`.
    Frank,
    /// `phi_n = pi n (n - 1) / N`, `n = 1..N`.
    Golomb,
    /// Uniform over the alphabet.
    Random { seed: u64 },
    /// Uniform over `{+1, -1}`; only valid with the binary alphabet.
    BinaryRandom { seed: u64 },
}

impl Generator {
    pub fn generate(&self, n: usize, alphabet: Alphabet) -> Result<PhaseSequence> {
        check_len(n)?;
        alphabet.validate()?;
        match *self {
            Generator::Frank => {
                let l = (n as f64).sqrt().round() as usize;
                if l * l != n {
                    return Err(Error::FrankLengthNotSquare(n));
                }
                let phases = (0..l)
                    .flat_map(|m| (0..l).map(move |k| TAU / l as f64 * ((m * k) % l) as f64))
                    .collect();
                PhaseSequence::continuous(phases)?.quantize(alphabet)
            }
            Generator::Golomb => {
                let phases = (1..=n)
                    .map(|k| {
                        // reduce n(n-1) mod 2N first to keep the phase small
                        let num = ((k * (k - 1)) % (2 * n)) as f64;
                        PI * num / n as f64
                    })
                    .collect();
                PhaseSequence::continuous(phases)?.quantize(alphabet)
            }
            Generator::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                match alphabet {
                    Alphabet::Continuous => {
                        PhaseSequence::continuous((0..n).map(|_| rng.gen::<f64>() * TAU).collect())
                    }
                    Alphabet::Discrete(m) => {
                        PhaseSequence::discrete(m, (0..n).map(|_| rng.gen_range(0..m)).collect())
                    }
                }
            }
            Generator::BinaryRandom { seed } => {
                if !alphabet.is_binary() {
                    return Err(Error::AlphabetMismatch {
                        expected: "binary".into(),
                        found: alphabet.to_string(),
                    });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                PhaseSequence::discrete(2, (0..n).map(|_| rng.gen_range(0..2)).collect())
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Frank => write!(f, "frank"),
            Generator::Golomb => write!(f, "golomb"),
            Generator::Random { seed } => write!(f, "random:{seed}"),
            Generator::BinaryRandom { seed } => write!(f, "binary-random:{seed}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frank_four() {
        let s = Generator::Frank.generate(4, Alphabet::Continuous).unwrap();
        assert_eq!(s.phases(), vec![0.0, 0.0, 0.0, PI]);
    }

    #[test]
    fn frank_rejects_non_square() {
        assert_eq!(
            Generator::Frank.generate(10, Alphabet::Continuous),
            Err(Error::FrankLengthNotSquare(10))
        );
        assert!(Generator::Frank.generate(9, Alphabet::Continuous).is_ok());
    }

    #[test]
    fn golomb_three() {
        let s = Generator::Golomb.generate(3, Alphabet::Continuous).unwrap();
        let expected: Vec<f64> = (1..=3).map(|k| PI * (k * (k - 1)) as f64 / 3.0).collect();
        // equal as points of the circle
        for (i, b) in expected.iter().enumerate() {
            assert!((s.entry(i) - Complex64::from_polar(1.0, *b)).norm() < 1e-14);
        }
    }

    #[test]
    fn random_is_reproducible() {
        for alphabet in [
            Alphabet::Continuous,
            Alphabet::Discrete(8),
            Alphabet::BINARY,
        ] {
            let a = Generator::Random { seed: 42 }
                .generate(33, alphabet)
                .unwrap();
            let b = Generator::Random { seed: 42 }
                .generate(33, alphabet)
                .unwrap();
            let c = Generator::Random { seed: 43 }
                .generate(33, alphabet)
                .unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn binary_random_needs_binary_alphabet() {
        assert!(Generator::BinaryRandom { seed: 1 }
            .generate(8, Alphabet::Discrete(4))
            .is_err());
        let s = Generator::BinaryRandom { seed: 1 }
            .generate(8, Alphabet::BINARY)
            .unwrap();
        assert!(s.indices().unwrap().iter().all(|&j| j < 2));
    }

    #[test]
    fn binary_entries_are_exact() {
        let s = PhaseSequence::from_signs(&[1, -1, 1, 1]).unwrap();
        let e = s.entries();
        assert_eq!(e[1], Complex64::new(-1.0, 0.0));
        assert_eq!(unit_root(3, 4), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn rejects_short_and_out_of_alphabet() {
        assert!(PhaseSequence::continuous(vec![0.0]).is_err());
        assert!(PhaseSequence::discrete(4, vec![0, 4]).is_err());
        assert!(PhaseSequence::discrete(1, vec![0, 0]).is_err());
    }

    #[test]
    fn alphabet_parse() {
        assert_eq!("binary".parse::<Alphabet>().unwrap(), Alphabet::BINARY);
        assert_eq!("m:64".parse::<Alphabet>().unwrap(), Alphabet::Discrete(64));
        assert_eq!(
            "continuous".parse::<Alphabet>().unwrap(),
            Alphabet::Continuous
        );
        assert!("m:1".parse::<Alphabet>().is_err());
        assert!("qpsk".parse::<Alphabet>().is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let d = Generator::Random { seed: 9 }
            .generate(17, Alphabet::Discrete(16))
            .unwrap();
        assert_eq!(
            PhaseSequence::from_json_str(&d.to_json_string()).unwrap(),
            d
        );
        let c = Generator::Random { seed: 9 }
            .generate(17, Alphabet::Continuous)
            .unwrap();
        assert_eq!(
            PhaseSequence::from_json_str(&c.to_json_string()).unwrap(),
            c
        );
    }

    #[test]
    fn json_errors_name_the_field() {
        let bad = r#"{"n": 3, "alphabet": "continuous", "phases": [0.0, 1.0]}"#;
        match PhaseSequence::from_json_str(bad) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "phases"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = r#"{"n": 2, "alphabet": {"discrete": 4}, "phases": [0.0, 0.0]}"#;
        match PhaseSequence::from_json_str(bad) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "indices"),
            other => panic!("unexpected {other:?}"),
        }
        let bad =
            r#"{"n": 2, "alphabet": {"discrete": 4}, "phases": [0.0, 0.5], "indices": [0, 1]}"#;
        match PhaseSequence::from_json_str(bad) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "phases"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
