//! Alphabets, length-4 relators and the two sampling models.
//!
//! A presentation in the positive square model has `⌊n^{4d}⌋` distinct
//! positive words of length 4; in the square model it has `⌊(2n-1)^{4d}⌋`
//! distinct cyclically reduced words of length 4. Relator counts are
//! computed exactly with integer roots, never with a bare `powf`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rng;

/// Largest generator count accepted by the samplers.
pub const MAX_GENERATORS: u32 = 10_000;

/// Densities carry at most this many decimal places.
pub const MAX_DENSITY_DECIMALS: usize = 4;

/// Relators always have this many letters.
pub const RELATOR_LEN: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("density `{0}` must be a decimal in (0,1) with at most {MAX_DENSITY_DECIMALS} decimal places")]
    InvalidDensity(String),
    #[error("generator count {0} outside the supported range 1..={MAX_GENERATORS}")]
    UnsupportedSize(u64),
    #[error("letter {letter} refers to a generator outside 1..={n}")]
    GeneratorOutOfRange { letter: i32, n: u32 },
    #[error("relator {0} is not cyclically reduced")]
    NotCyclicallyReduced(Relator),
    #[error("relator {0} is not positive but the model is positive")]
    NotPositive(Relator),
    #[error("relator {0} appears twice")]
    DuplicateRelator(Relator),
    #[error("{requested} relators requested but only {available} words exist")]
    TooManyRelators { requested: u64, available: u64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Which word universe relators are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    /// Positive words of length 4, `W_n`.
    PositiveSquare,
    /// Cyclically reduced words of length 4, `W'_n`.
    Square,
}

impl Model {
    /// Base of the density power: `n` or `2n - 1`.
    pub fn base(self, n: u32) -> u64 {
        match self {
            Model::PositiveSquare => n as u64,
            Model::Square => 2 * n as u64 - 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Model::PositiveSquare => "positive",
            Model::Square => "square",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Model::PositiveSquare),
            "square" => Ok(Model::Square),
            other => Err(format!("unknown model `{other}` (expected positive|square)")),
        }
    }
}

impl Serialize for Model {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A density in (0,1), kept as an exact decimal fraction.
///
/// The decimal text is preserved so that files and derived seeds use the
/// exact string the user wrote.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Density {
    numer: u64,
    denom: u64,
    text: String,
}

impl Density {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let bad = || ModelError::InvalidDensity(text.to_string());
        let t = text.trim();
        let (int_part, frac_part) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if !(int_part.is_empty() || int_part.chars().all(|c| c == '0')) {
            return Err(bad());
        }
        if frac_part.is_empty()
            || frac_part.len() > MAX_DENSITY_DECIMALS
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let numer: u64 = frac_part.parse().map_err(|_| bad())?;
        let denom = 10u64.pow(frac_part.len() as u32);
        if numer == 0 {
            return Err(bad());
        }
        let g = numer.gcd(&denom);
        let digits = frac_part.trim_end_matches('0');
        Ok(Density {
            numer: numer / g,
            denom: denom / g,
            text: format!("0.{digits}"),
        })
    }

    /// Uses the shortest decimal that round-trips `value`.
    pub fn from_f64(value: f64) -> Result<Self, ModelError> {
        if !value.is_finite() {
            return Err(ModelError::InvalidDensity(value.to_string()));
        }
        Density::parse(&format!("{value}"))
    }

    pub fn value(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// The density as a reduced fraction `numer / denom`.
    pub fn fraction(&self) -> (u64, u64) {
        (self.numer, self.denom)
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for Density {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Density::parse(s)
    }
}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.numer as u128 * other.denom as u128).cmp(&(other.numer as u128 * self.denom as u128))
    }
}

impl Serialize for Density {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

/// `⌊base^{4d}⌋`, exact.
///
/// With `4d = a/b` in lowest terms the result is the integer `b`-th root of
/// `base^a`, which is then verified against both neighbours.
pub fn floor_density_power(base: u64, d: &Density) -> u64 {
    let (p, q) = d.fraction();
    let g = (4 * p).gcd(&q);
    let (a, b) = ((4 * p / g) as u32, (q / g) as u32);
    let power = BigUint::from(base).pow(a);
    let root = power.nth_root(b);
    debug_assert!(root.pow(b) <= power && (&root + 1u32).pow(b) > power);
    root.to_u64().expect("relator count exceeds u64")
}

/// Number of relators `|R_n|` the sampler draws.
pub fn num_relators(n: u32, d: &Density, model: Model) -> Result<u64, ModelError> {
    check_size(n)?;
    Ok(floor_density_power(model.base(n), d))
}

fn check_size(n: u32) -> Result<(), ModelError> {
    if n == 0 || n > MAX_GENERATORS {
        return Err(ModelError::UnsupportedSize(n as u64));
    }
    Ok(())
}

/// A generator `a_k` (value `k`) or its inverse (value `-k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: u32, positive: bool) -> Self {
        assert!(generator >= 1, "generators are numbered from 1");
        let g = generator as i32;
        Letter(if positive { g } else { -g })
    }

    /// From the signed integer encoding used in files. Panics on 0.
    pub fn from_signed(value: i32) -> Self {
        assert!(value != 0, "letter 0 does not exist");
        Letter(value)
    }

    pub fn pos(generator: u32) -> Self {
        Letter::new(generator, true)
    }

    pub fn neg(generator: u32) -> Self {
        Letter::new(generator, false)
    }

    pub fn generator(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn sign(self) -> i64 {
        self.0.signum() as i64
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn signed(self) -> i32 {
        self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "a{}", self.generator())
        } else {
            write!(f, "a{}^-1", self.generator())
        }
    }
}

/// True iff no two cyclically adjacent letters cancel.
pub fn is_cyclically_reduced(word: &[Letter]) -> bool {
    let len = word.len();
    if len == 1 {
        return true;
    }
    (0..len).all(|i| word[i] != word[(i + 1) % len].inverse())
}

/// A word of exactly four letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Relator(pub [Letter; RELATOR_LEN]);

impl Relator {
    pub fn new(letters: [Letter; RELATOR_LEN]) -> Self {
        Relator(letters)
    }

    /// Build from signed integers, e.g. `[1, -2, 1, -2]` for `a1 a2⁻¹ a1 a2⁻¹`.
    pub fn from_signed(values: [i32; RELATOR_LEN]) -> Self {
        Relator(values.map(Letter::from_signed))
    }

    pub fn letters(&self) -> &[Letter; RELATOR_LEN] {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.is_positive())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        is_cyclically_reduced(&self.0)
    }
}

impl fmt::Display for Relator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.signed().to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Size of the word universe: `n^4` for the positive model, `|W'_n|` for
/// the square model.
///
/// `|W'_n|` is enumerated directly for `n <= 4` and otherwise given by the
/// closed form `(2n-1)^4 + 2n - 1`, which the tests check against
/// enumeration.
pub fn count_words(n: u32, model: Model) -> u64 {
    let n64 = n as u64;
    match model {
        Model::PositiveSquare => n64.pow(4),
        Model::Square if n <= 4 => enumerate_cyclically_reduced(n),
        Model::Square => (2 * n64 - 1).pow(4) + 2 * n64 - 1,
    }
}

/// Brute-force count of cyclically reduced words of length 4 on `n` generators.
pub fn enumerate_cyclically_reduced(n: u32) -> u64 {
    let letters: Vec<Letter> = (1..=n)
        .flat_map(|g| [Letter::pos(g), Letter::neg(g)])
        .collect();
    let mut count = 0;
    for &a in &letters {
        for &b in &letters {
            for &c in &letters {
                for &d in &letters {
                    if is_cyclically_reduced(&[a, b, c, d]) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// A finite presentation `<a_1..a_n | R>` with relators of length 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    model: Model,
    n: u32,
    density: Density,
    seed: u64,
    relators: Vec<Relator>,
}

impl Presentation {
    /// Validates letters and the model's word constraint; relator count is
    /// not tied to the density here, so hand-written presentations work.
    pub fn new(
        model: Model,
        n: u32,
        density: Density,
        seed: u64,
        relators: Vec<Relator>,
    ) -> Result<Self, ModelError> {
        check_size(n)?;
        let mut seen = HashSet::with_capacity(relators.len());
        for r in &relators {
            for l in r.letters() {
                if l.generator() > n {
                    return Err(ModelError::GeneratorOutOfRange { letter: l.signed(), n });
                }
            }
            if !r.is_cyclically_reduced() {
                return Err(ModelError::NotCyclicallyReduced(*r));
            }
            if model == Model::PositiveSquare && !r.is_positive() {
                return Err(ModelError::NotPositive(*r));
            }
            if !seen.insert(*r) {
                return Err(ModelError::DuplicateRelator(*r));
            }
        }
        Ok(Presentation { model, n, density, seed, relators })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    /// A copy with the given relators (validated against the same model).
    pub fn with_relators(&self, relators: Vec<Relator>) -> Result<Self, ModelError> {
        Presentation::new(self.model, self.n, self.density.clone(), self.seed, relators)
    }

    /// Relators whose letters are all positive, `R ∩ W_n`.
    pub fn positive_subset(&self) -> Vec<Relator> {
        self.relators.iter().copied().filter(Relator::is_positive).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("square-model v1\n");
        out.push_str(&format!(
            "model={} n={} d={} seed={}\n",
            self.model, self.n, self.density, self.seed
        ));
        for r in &self.relators {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let perr = |line: usize, message: String| ModelError::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, "square-model v1")) => {}
            Some((i, other)) => return Err(perr(i, format!("bad header `{other}`"))),
            None => return Err(perr(1, "empty file".into())),
        }
        let (hline, header) = lines.next().ok_or_else(|| perr(2, "missing parameter line".into()))?;
        let mut model = None;
        let mut n = None;
        let mut d = None;
        let mut seed = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| perr(hline, format!("expected key=value, got `{field}`")))?;
            match key {
                "model" => model = Some(value.parse::<Model>().map_err(|e| perr(hline, e))?),
                "n" => {
                    n = Some(value.parse::<u32>().map_err(|e| perr(hline, format!("n: {e}")))?)
                }
                "d" => d = Some(Density::parse(value)?),
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|e| perr(hline, format!("seed: {e}")))?)
                }
                other => return Err(perr(hline, format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| perr(hline, format!("missing `{k}`"));
        let model = model.ok_or_else(|| missing("model"))?;
        let n = n.ok_or_else(|| missing("n"))?;
        let d = d.ok_or_else(|| missing("d"))?;
        let seed = seed.ok_or_else(|| missing("seed"))?;

        let mut relators = Vec::new();
        for (i, line) in lines {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let values: Vec<i32> = line
                .split_whitespace()
                .map(|t| t.parse::<i32>().map_err(|e| perr(i, format!("`{t}`: {e}"))))
                .collect::<Result<_, _>>()?;
            if values.len() != RELATOR_LEN || values.contains(&0) {
                return Err(perr(i, "relators are 4 nonzero integers".into()));
            }
            relators.push(Relator::from_signed([values[0], values[1], values[2], values[3]]));
        }
        Presentation::new(model, n, d, seed, relators)
    }
}

fn random_word(rng: &mut rng::Stream, n: u32, model: Model) -> Relator {
    match model {
        Model::PositiveSquare => Relator([(); RELATOR_LEN].map(|_| Letter::pos(rng.gen_range(1..=n)))),
        Model::Square => loop {
            let word = [(); RELATOR_LEN].map(|_| {
                let k = rng.gen_range(0..2 * n);
                Letter::new(k / 2 + 1, k % 2 == 0)
            });
            if is_cyclically_reduced(&word) {
                break Relator(word);
            }
        },
    }
}

/// Draw a uniform `num_relators(n, d, model)`-subset of the word universe.
///
/// Words are drawn uniformly (with rejection of non-reduced words in the
/// square model) and repeats are discarded, so each accepted word is uniform
/// over the words not yet chosen.
pub fn sample_presentation(
    n: u32,
    d: &Density,
    model: Model,
    seed: u64,
) -> Result<Presentation, ModelError> {
    let count = num_relators(n, d, model)?;
    let available = count_words(n, model);
    if count > available {
        return Err(ModelError::TooManyRelators { requested: count, available });
    }
    let mut rng = rng::stream(seed);
    let mut seen = HashSet::with_capacity(count as usize);
    let mut relators = Vec::with_capacity(count as usize);
    while (relators.len() as u64) < count {
        let word = random_word(&mut rng, n, model);
        if seen.insert(word) {
            relators.push(word);
        }
    }
    Ok(Presentation { model, n, density: d.clone(), seed, relators })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dens(s: &str) -> Density {
        Density::parse(s).unwrap()
    }

    #[test]
    fn relator_counts() {
        assert_eq!(num_relators(10, &dens("0.3"), Model::PositiveSquare).unwrap(), 15);
        assert_eq!(num_relators(5, &dens("0.25"), Model::PositiveSquare).unwrap(), 5);
        assert_eq!(num_relators(3, &dens("0.5"), Model::Square).unwrap(), 25);
        assert_eq!(num_relators(2, &dens("0.9"), Model::PositiveSquare).unwrap(), 12);
    }

    #[test]
    fn relator_count_matches_float_away_from_integers() {
        for n in [2u32, 7, 30, 200, 1000, 10_000] {
            for d in ["0.05", "0.1", "0.3", "0.65", "0.9", "0.1234"] {
                let d = dens(d);
                let exact = num_relators(n, &d, Model::PositiveSquare).unwrap();
                let approx = (n as f64).powf(4.0 * d.value());
                if approx < 1e14 && (approx - approx.round()).abs() > 1e-6 {
                    assert_eq!(exact, approx.floor() as u64, "n={n} d={d}");
                }
            }
        }
    }

    #[test]
    fn relator_count_errors() {
        assert!(Density::parse("1.0").is_err());
        assert!(Density::parse("0").is_err());
        assert!(Density::parse("0.12345").is_err());
        assert!(Density::parse("-0.3").is_err());
        assert!(matches!(
            num_relators(20_000, &dens("0.5"), Model::Square),
            Err(ModelError::UnsupportedSize(20_000))
        ));
    }

    #[test]
    fn density_text_roundtrip() {
        assert_eq!(Density::from_f64(0.65).unwrap().as_str(), "0.65");
        assert_eq!(dens("0.250").as_str(), "0.25");
        assert_eq!(dens("0.250").fraction(), (1, 4));
        assert!(dens("0.3") < dens("0.31"));
    }

    #[test]
    fn cyclic_reduction() {
        let w = |v: [i32; 4]| v.map(Letter::from_signed);
        assert!(is_cyclically_reduced(&w([1, 2, -1, 2])));
        assert!(!is_cyclically_reduced(&w([1, 2, -2, 1])));
        assert!(is_cyclically_reduced(&w([1, 1, 1, 1])));
        assert!(!is_cyclically_reduced(&w([1, 2, 2, -1])));
        assert!(is_cyclically_reduced(&w([1, -2, 1, -2])));
    }

    #[test]
    fn word_counts() {
        assert_eq!(count_words(2, Model::PositiveSquare), 16);
        assert_eq!(count_words(1, Model::Square), 2);
        assert_eq!(count_words(2, Model::Square), 84);
        for n in 1..=8 {
            let closed = (2 * n as u64 - 1).pow(4) + 2 * n as u64 - 1;
            assert_eq!(enumerate_cyclically_reduced(n), closed, "n={n}");
            let lower = 2 * n as u64 * (2 * n as u64 - 1).pow(2) * (2 * n as u64 - 2);
            assert!(count_words(n, Model::Square) >= lower);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_exact_size() {
        let a = sample_presentation(4, &dens("0.5"), Model::PositiveSquare, 1).unwrap();
        let b = sample_presentation(4, &dens("0.5"), Model::PositiveSquare, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.relators().len(), 16);
        assert!(a.relators().iter().all(Relator::is_positive));

        let c = sample_presentation(2, &dens("0.9"), Model::PositiveSquare, 3).unwrap();
        assert_eq!(c.relators().len(), 12);
        assert!(c.relators().iter().all(Relator::is_positive));

        let s = sample_presentation(1, &dens("0.5"), Model::Square, 7).unwrap();
        assert_eq!(s.relators().len(), 1);
        let r = s.relators()[0];
        assert!(r == Relator::from_signed([1, 1, 1, 1]) || r == Relator::from_signed([-1, -1, -1, -1]));
    }

    #[test]
    fn square_sampling_is_reduced_and_duplicate_free() {
        let p = sample_presentation(6, &dens("0.6"), Model::Square, 11).unwrap();
        assert_eq!(p.relators().len() as u64, num_relators(6, &dens("0.6"), Model::Square).unwrap());
        assert!(p.relators().iter().all(Relator::is_cyclically_reduced));
        let unique: HashSet<_> = p.relators().iter().collect();
        assert_eq!(unique.len(), p.relators().len());
    }

    #[test]
    fn positive_subset_filters() {
        let d = dens("0.5");
        let mixed = Presentation::new(
            Model::Square,
            4,
            d.clone(),
            0,
            vec![Relator::from_signed([1, 2, 3, 4]), Relator::from_signed([1, -2, 1, -2])],
        )
        .unwrap();
        assert_eq!(mixed.positive_subset(), vec![Relator::from_signed([1, 2, 3, 4])]);

        let none = mixed.with_relators(vec![Relator::from_signed([1, -2, 1, -2])]).unwrap();
        assert!(none.positive_subset().is_empty());

        let all = sample_presentation(3, &d, Model::PositiveSquare, 5).unwrap();
        assert_eq!(all.positive_subset(), all.relators());
    }

    #[test]
    fn presentation_validation() {
        let d = dens("0.5");
        let bad = Presentation::new(Model::PositiveSquare, 2, d.clone(), 0, vec![Relator::from_signed([1, -2, 1, 2])]);
        assert!(matches!(bad, Err(ModelError::NotPositive(_))));
        let bad = Presentation::new(Model::Square, 2, d.clone(), 0, vec![Relator::from_signed([1, 2, -2, 1])]);
        assert!(matches!(bad, Err(ModelError::NotCyclicallyReduced(_))));
        let bad = Presentation::new(Model::Square, 2, d.clone(), 0, vec![Relator::from_signed([1, 3, 1, 1])]);
        assert!(matches!(bad, Err(ModelError::GeneratorOutOfRange { .. })));
        let r = Relator::from_signed([1, 1, 1, 2]);
        let bad = Presentation::new(Model::Square, 2, d, 0, vec![r, r]);
        assert!(matches!(bad, Err(ModelError::DuplicateRelator(_))));
    }

    #[test]
    fn file_format_roundtrip() {
        let p = sample_presentation(5, &dens("0.3"), Model::Square, 42).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("square-model v1\nmodel=square n=5 d=0.3 seed=42\n"));
        assert_eq!(Presentation::from_text(&text).unwrap(), p);
        assert!(Presentation::from_text("square-model v2\n").is_err());
        assert!(Presentation::from_text("square-model v1\nmodel=positive n=2 d=0.5 seed=1\n1 2 0 1\n").is_err());
    }
}
