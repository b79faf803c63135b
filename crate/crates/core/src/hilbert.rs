//! Truncated Fock space over the three polariton modes b₀, b₁, b₂ and the
//! collective Rydberg pair mode p (p† stands for C†_{r1}C†_{r3} as a unit).
//!
//! A pair quantum carries excitation weight 2, since the blockade terms turn
//! two polariton quanta into one pair.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::operator::OperatorMatrix;
use crate::error::{Result, SimError};
use crate::scalar::{lit, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    B0,
    B1,
    B2,
    Pair,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::B0, Mode::B1, Mode::B2, Mode::Pair];
    pub const POLARITONS: [Mode; 3] = [Mode::B0, Mode::B1, Mode::B2];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Excitation quanta carried by one occupation of this mode.
    pub fn weight(self) -> usize {
        match self {
            Mode::Pair => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::B0 => "b0",
            Mode::B1 => "b1",
            Mode::B2 => "b2",
            Mode::Pair => "p",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "b0" => Ok(Mode::B0),
            "b1" => Ok(Mode::B1),
            "b2" => Ok(Mode::B2),
            "p" | "pair" => Ok(Mode::Pair),
            _ => Err(SimError::UnknownMode(s.to_string())),
        }
    }
}

/// Occupations (n0, n1, n2, np).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BasisState(pub [usize; 4]);

impl BasisState {
    pub const VACUUM: BasisState = BasisState([0; 4]);

    pub fn new(n0: usize, n1: usize, n2: usize, np: usize) -> Self {
        Self([n0, n1, n2, np])
    }

    pub fn occupation(&self, mode: Mode) -> usize {
        self.0[mode.index()]
    }

    pub fn weight(&self) -> usize {
        Mode::ALL.iter().map(|&m| m.weight() * self.occupation(m)).sum()
    }

    fn shifted(&self, mode: Mode, up: bool) -> Option<Self> {
        let mut s = *self;
        let n = &mut s.0[mode.index()];
        if up {
            *n += 1;
        } else {
            *n = n.checked_sub(1)?;
        }
        Some(s)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "|{a},{b},{c},{d}>")
    }
}

/// Truncation of the Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Cap on n0 + n1 + n2 + 2·np.
    pub n_tot_max: usize,
    /// Optional per-mode occupation caps, indexed like [`Mode::ALL`];
    /// serialized as a `{ mode = cap }` table holding only the set caps.
    #[serde(default, with = "mode_caps_table")]
    pub mode_caps: [Option<usize>; 4],
    /// Restricts the pair mode to np ≤ 1.
    #[serde(default)]
    pub hard_core_pair: bool,
}

impl Truncation {
    pub fn new(n_tot_max: usize) -> Self {
        Self { n_tot_max, mode_caps: [None; 4], hard_core_pair: false }
    }

    pub fn with_cap(mut self, mode: Mode, cap: usize) -> Self {
        self.mode_caps[mode.index()] = Some(cap);
        self
    }

    pub fn hard_core(mut self, on: bool) -> Self {
        self.hard_core_pair = on;
        self
    }

    fn cap(&self, mode: Mode) -> usize {
        let mut cap = self.mode_caps[mode.index()].unwrap_or(usize::MAX);
        if mode == Mode::Pair && self.hard_core_pair {
            cap = cap.min(1);
        }
        cap.min(self.n_tot_max / mode.weight())
    }

    pub fn admits(&self, s: &BasisState) -> bool {
        s.weight() <= self.n_tot_max && Mode::ALL.iter().all(|&m| s.occupation(m) <= self.cap(m))
    }
}

mod mode_caps_table {
    use std::collections::BTreeMap;
    use std::str::FromStr;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Mode;

    pub fn serialize<S: Serializer>(caps: &[Option<usize>; 4], s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(Mode::ALL.iter().zip(caps).filter_map(|(m, c)| c.map(|c| (m.name(), c))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Option<usize>; 4], D::Error> {
        let table = BTreeMap::<String, usize>::deserialize(d)?;
        let mut caps = [None; 4];
        for (name, cap) in table {
            let mode = Mode::from_str(&name).map_err(D::Error::custom)?;
            caps[mode.index()] = Some(cap);
        }
        Ok(caps)
    }
}

/// Smallest total cap at which the reference-point g²(0) is converged:
/// going from 4 to 6 still moves it by about 35%, from 6 upward by < 1e-4.
pub const DEFAULT_N_TOT_MAX: usize = 6;

impl Default for Truncation {
    fn default() -> Self {
        Self::new(DEFAULT_N_TOT_MAX)
    }
}

/// Lexicographically ordered list of admitted basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
    truncation: Truncation,
}

impl Basis {
    pub fn build(truncation: Truncation) -> Self {
        let caps = Mode::ALL.map(|m| truncation.cap(m));
        let mut states = Vec::new();
        for n0 in 0..=caps[0] {
            for n1 in 0..=caps[1] {
                for n2 in 0..=caps[2] {
                    for np in 0..=caps[3] {
                        let s = BasisState([n0, n1, n2, np]);
                        if truncation.admits(&s) {
                            states.push(s);
                        }
                    }
                }
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self { states, index, truncation }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn state(&self, i: usize) -> BasisState {
        self.states[i]
    }

    /// Unit vector on a basis state.
    pub fn ket<T: Real>(&self, s: BasisState) -> Option<Vec<C<T>>> {
        let i = self.index_of(&s)?;
        let mut v = vec![C::new(T::zero(), T::zero()); self.dim()];
        v[i] = C::new(T::one(), T::zero());
        Some(v)
    }

    pub fn vacuum<T: Real>(&self) -> Vec<C<T>> {
        self.ket(BasisState::VACUUM).expect("vacuum is always admitted")
    }

    /// Bosonic lowering operator; matrix element √n.
    pub fn annihilator<T: Real>(&self, mode: Mode) -> OperatorMatrix<T> {
        let entries = self.states.iter().enumerate().filter_map(|(j, s)| {
            let n = s.occupation(mode);
            let target = s.shifted(mode, false)?;
            let i = self.index_of(&target)?;
            Some((i, j, C::new(lit::<T>(n as f64).sqrt(), T::zero())))
        });
        OperatorMatrix::from_triplets(self.dim(), entries)
    }

    /// Bosonic raising operator, built directly (√(n+1)); images outside the
    /// truncation map to zero.
    pub fn creator<T: Real>(&self, mode: Mode) -> OperatorMatrix<T> {
        let entries = self.states.iter().enumerate().filter_map(|(j, s)| {
            let n = s.occupation(mode);
            let target = s.shifted(mode, true)?;
            let i = self.index_of(&target)?;
            Some((i, j, C::new(lit::<T>((n + 1) as f64).sqrt(), T::zero())))
        });
        OperatorMatrix::from_triplets(self.dim(), entries)
    }

    pub fn number_operator<T: Real>(&self, mode: Mode) -> OperatorMatrix<T> {
        self.diagonal(|s| s.occupation(mode) as f64)
    }

    /// n0 + n1 + n2 + 2·np.
    pub fn total_excitation_operator<T: Real>(&self) -> OperatorMatrix<T> {
        self.diagonal(|s| s.weight() as f64)
    }

    /// b†b†bb for one mode: n(n−1) on the diagonal.
    pub fn pair_correlation_operator<T: Real>(&self, mode: Mode) -> OperatorMatrix<T> {
        self.diagonal(|s| {
            let n = s.occupation(mode) as f64;
            n * (n - 1.0)
        })
    }

    fn diagonal<T: Real>(&self, f: impl Fn(&BasisState) -> f64) -> OperatorMatrix<T> {
        OperatorMatrix::from_diagonal(self.states.iter().map(|s| C::new(lit(f(s)), T::zero())))
    }
}
