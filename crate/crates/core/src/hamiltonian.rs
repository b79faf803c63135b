//! Interaction-picture Hamiltonians in the polariton basis.
//!
//! Every Hamiltonian is a list of static operators with exact complex
//! exponential prefactors, `H(t) = Σ_k c_k e^{iω_k t} A_k + D`, where `D` is
//! the diagonal anti-Hermitian decay part `−i Σ_m (Γ_m/2) n_m`.

use std::fmt::Write as _;

use log::warn;
use num_traits::Zero;

use crate::error::{Result, SimError};
use crate::hilbert::{Basis, Mode, OperatorMatrix};
use crate::model::{DerivedParams, DEFAULT_RATIO_THRESHOLD};
use crate::operator::symmetric_eigen;
use crate::scalar::{lit, re, to_f64, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct Term<T> {
    /// Operator name without the conjugation marker, e.g. `p+ b0 b0`.
    pub label: &'static str,
    /// True for the `+H.c.` partner.
    pub conjugate: bool,
    pub coefficient: C<T>,
    /// Angular frequency ω of the `e^{iωt}` prefactor.
    pub frequency: T,
    pub operator: OperatorMatrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerms<T> {
    pub terms: Vec<Term<T>>,
    /// Γ_m per mode; D = −i Σ_m (Γ_m/2) n_m.
    mode_decay: [T; 4],
    occupations: Vec<[usize; 4]>,
}

impl<T: Real> HamiltonianTerms<T> {
    fn empty(basis: &Basis) -> Self {
        Self {
            terms: Vec::new(),
            mode_decay: [T::zero(); 4],
            occupations: basis.states().iter().map(|s| s.0).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    /// Adds `c e^{iωt} A` and its Hermitian conjugate `c* e^{−iωt} A†`.
    fn push_with_conjugate(&mut self, label: &'static str, c: T, frequency: T, op: OperatorMatrix<T>) {
        if c == T::zero() {
            return;
        }
        let adj = op.adjoint();
        self.terms.push(Term { label, conjugate: false, coefficient: re(c), frequency, operator: op });
        self.terms.push(Term { label, conjugate: true, coefficient: re(c), frequency: -frequency, operator: adj });
    }

    pub fn mode_decay_rates(&self) -> [T; 4] {
        self.mode_decay
    }

    pub fn add_mode_decay(&mut self, mode: Mode, rate: T) {
        self.mode_decay[mode.index()] = self.mode_decay[mode.index()] + rate;
    }

    /// Diagonal of `i·D`, i.e. the non-negative half-rates per basis state.
    pub fn decay_diagonal(&self) -> Vec<T> {
        let half = lit::<T>(0.5);
        self.occupations
            .iter()
            .map(|occ| {
                Mode::ALL
                    .iter()
                    .map(|&m| self.mode_decay[m.index()] * lit(occ[m.index()] as f64))
                    .sum::<T>()
                    * half
            })
            .collect()
    }

    pub fn decay_operator(&self) -> OperatorMatrix<T> {
        OperatorMatrix::from_diagonal(self.decay_diagonal().into_iter().map(|d| C::new(T::zero(), -d)))
    }

    /// Σ_k c_k e^{iω_k t} A_k (excludes D).
    pub fn hermitian_part_at(&self, t: T) -> OperatorMatrix<T> {
        let dim = self.dim();
        OperatorMatrix::from_triplets(
            dim,
            self.terms.iter().flat_map(|term| {
                let phase = term.coefficient * C::from_polar(T::one(), term.frequency * t);
                term.operator.triplets().map(move |(r, c, v)| (r, c, v * phase))
            }),
        )
    }

    /// Full H(t) including D.
    pub fn evaluate(&self, t: T) -> OperatorMatrix<T> {
        self.hermitian_part_at(t).add(&self.decay_operator())
    }

    /// Terms with exactly zero frequency.
    pub fn static_terms(&self) -> impl Iterator<Item = &Term<T>> {
        self.terms.iter().filter(|t| t.frequency == T::zero())
    }

    /// One line per term: label, coefficient, frequency, nnz.
    pub fn debug_dump(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            let hc = if t.conjugate { " (H.c.)" } else { "" };
            let _ = writeln!(
                s,
                "{:<14}{:<7} coeff=({:.6e}, {:.6e}) freq={:.6e} nnz={}",
                t.label, hc, t.coefficient.re, t.coefficient.im, t.frequency, t.operator.nnz()
            );
        }
        let _ = writeln!(s, "decay rates per mode [b0, b1, b2, p] = {:?}", self.mode_decay);
        s
    }

    pub fn compile(&self) -> Result<Generator<T>> {
        Generator::new(self)
    }
}

struct Ops<T: Real> {
    b: [OperatorMatrix<T>; 4],
    pair_dag: OperatorMatrix<T>,
}

impl<T: Real> Ops<T> {
    fn new(basis: &Basis) -> Self {
        let b = Mode::ALL.map(|m| basis.annihilator(m));
        let pair_dag = basis.creator(Mode::Pair);
        Self { b, pair_dag }
    }

    /// p† b_i b_j
    fn pair_from(&self, i: Mode, j: Mode) -> OperatorMatrix<T> {
        self.pair_dag.matmul(&self.b[i.index()]).matmul(&self.b[j.index()])
    }
}

fn add_polariton_decay<T: Real>(h: &mut HamiltonianTerms<T>, dp: &DerivedParams<T>) {
    for (m, k) in Mode::POLARITONS.into_iter().zip(dp.decay_rates()) {
        h.add_mode_decay(m, k);
    }
}

fn add_drives<T: Real>(h: &mut HamiltonianTerms<T>, ops: &Ops<T>, dp: &DerivedParams<T>) {
    const LABELS: [&str; 3] = ["b0", "b1", "b2"];
    for (k, m) in Mode::POLARITONS.into_iter().enumerate() {
        let freq = dp.delta - dp.energies()[k];
        h.push_with_conjugate(LABELS[k], dp.drive_strengths()[k], freq, ops.b[m.index()].clone());
    }
}

/// Full interaction-picture Hamiltonian: all six blockade terms with their
/// rotating phases, three drives at Δ − E_Λ, and polariton decay.
pub fn build_h_int<T: Real>(dp: &DerivedParams<T>, basis: &Basis) -> HamiltonianTerms<T> {
    let ops = Ops::new(basis);
    let mut h = HamiltonianTerms::empty(basis);
    let [_, e1, e2] = dp.energies();
    let two = lit::<T>(2.0);
    use Mode::*;
    h.push_with_conjugate("p+ b0 b0", dp.lambda_blockade, T::zero(), ops.pair_from(B0, B0));
    h.push_with_conjugate("p+ b1 b1", dp.chi_bright, -two * e1, ops.pair_from(B1, B1));
    h.push_with_conjugate("p+ b2 b2", dp.chi_bright, -two * e2, ops.pair_from(B2, B2));
    h.push_with_conjugate("p+ b1 b0", -dp.chi_mixed, -e1, ops.pair_from(B1, B0));
    h.push_with_conjugate("p+ b2 b0", -dp.chi_mixed, -e2, ops.pair_from(B2, B0));
    h.push_with_conjugate("p+ b2 b1", dp.chi_bright, -(e1 + e2), ops.pair_from(B2, B1));
    add_drives(&mut h, &ops, dp);
    add_polariton_decay(&mut h, dp);
    h
}

/// Conventional intracavity EIT: drives and decay only.
pub fn build_h_eit<T: Real>(dp: &DerivedParams<T>, basis: &Basis) -> HamiltonianTerms<T> {
    let ops = Ops::new(basis);
    let mut h = HamiltonianTerms::empty(basis);
    add_drives(&mut h, &ops, dp);
    add_polariton_decay(&mut h, dp);
    h
}

fn build_dark_sector<T: Real>(dp: &DerivedParams<T>, basis: &Basis) -> HamiltonianTerms<T> {
    if dp.delta != T::zero() {
        warn!("dark-sector Hamiltonian assumes resonant drive, but delta = {}", dp.delta);
    }
    if dp.rwa_margin < lit(DEFAULT_RATIO_THRESHOLD) {
        warn!(
            "rwa_margin = {} below {}; rotating-wave reduction is questionable",
            dp.rwa_margin, DEFAULT_RATIO_THRESHOLD
        );
    }
    let ops = Ops::new(basis);
    let mut h = HamiltonianTerms::empty(basis);
    h.push_with_conjugate("p+ b0 b0", dp.lambda_blockade, T::zero(), ops.pair_from(Mode::B0, Mode::B0));
    h.push_with_conjugate("b0", dp.omega_drive_0, T::zero(), ops.b[0].clone());
    h
}

/// Rotating-wave Hamiltonian on resonance with the dark polariton; keeps
/// the decay of all three polaritons.
pub fn build_h_rwa<T: Real>(dp: &DerivedParams<T>, basis: &Basis) -> HamiltonianTerms<T> {
    let mut h = build_dark_sector(dp, basis);
    add_polariton_decay(&mut h, dp);
    h
}

/// Effective blockade Hamiltonian: as [`build_h_rwa`] with only the dark
/// polariton decay K₀ retained.
pub fn build_h_eff<T: Real>(dp: &DerivedParams<T>, basis: &Basis) -> HamiltonianTerms<T> {
    let mut h = build_dark_sector(dp, basis);
    h.add_mode_decay(Mode::B0, dp.k0);
    h
}

/// Adds Rydberg decay γ_r on b₀ and excited-state decay γ_e on both bright
/// polaritons.
pub fn add_atomic_decay<T: Real>(mut h: HamiltonianTerms<T>, dp: &DerivedParams<T>) -> HamiltonianTerms<T> {
    h.add_mode_decay(Mode::B0, dp.gamma_r);
    h.add_mode_decay(Mode::B1, dp.gamma_e);
    h.add_mode_decay(Mode::B2, dp.gamma_e);
    h
}

/// Which Hamiltonian a simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianKind {
    /// Full interaction-picture Hamiltonian.
    #[default]
    Full,
    Rwa,
    Eff,
    Eit,
}

impl HamiltonianKind {
    pub fn name(self) -> &'static str {
        match self {
            HamiltonianKind::Full => "full",
            HamiltonianKind::Rwa => "rwa",
            HamiltonianKind::Eff => "eff",
            HamiltonianKind::Eit => "eit",
        }
    }
}

/// Builds the selected Hamiltonian with atomic spontaneous emission added.
pub fn build_with_atomic_decay<T: Real>(
    kind: HamiltonianKind,
    dp: &DerivedParams<T>,
    basis: &Basis,
) -> HamiltonianTerms<T> {
    let h = match kind {
        HamiltonianKind::Full => build_h_int(dp, basis),
        HamiltonianKind::Rwa => build_h_rwa(dp, basis),
        HamiltonianKind::Eff => build_h_eff(dp, basis),
        HamiltonianKind::Eit => build_h_eit(dp, basis),
    };
    add_atomic_decay(h, dp)
}

/// H₁ in the bare single-excitation basis (a†, C_e†, C_{r2}†) and its eigensystem.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitation<T> {
    pub matrix: [[T; 3]; 3],
    /// Ascending eigenvalues.
    pub eigenvalues: [T; 3],
    /// Normalized eigenvectors matching `eigenvalues`.
    pub eigenvectors: [[T; 3]; 3],
}

impl<T: Real> SingleExcitation<T> {
    /// Eigenvector of the zero eigenvalue (the dark polariton), sign fixed so
    /// the photon component is non-negative.
    pub fn dark_state(&self) -> [T; 3] {
        let k = (0..3)
            .min_by(|&a, &b| {
                self.eigenvalues[a]
                    .abs()
                    .partial_cmp(&self.eigenvalues[b].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(1);
        let v = self.eigenvectors[k];
        if v[0] < T::zero() {
            v.map(|x| -x)
        } else {
            v
        }
    }
}

pub fn single_excitation_h1<T: Real>(dp: &DerivedParams<T>) -> SingleExcitation<T> {
    let g = dp.e1 * dp.sin_theta; // √N g
    let om = dp.control_rabi;
    let z = T::zero();
    let matrix = [[z, g, z], [g, z, om], [z, om, z]];
    let (vals, vecs) = symmetric_eigen(&matrix.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    let eigenvalues = [vals[0], vals[1], vals[2]];
    let eigenvectors = [0, 1, 2].map(|k| [vecs[k][0], vecs[k][1], vecs[k][2]]);
    SingleExcitation { matrix, eigenvalues, eigenvectors }
}

/// Compiled form of [`HamiltonianTerms`] for fast repeated evaluation:
/// terms sharing a frequency are merged and all operators share one sparsity
/// pattern, so assembling H(t) costs one pass over the pattern per group.
#[derive(Debug, Clone)]
pub struct Generator<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    /// Time-independent part (static terms and decay) on the pattern.
    base: Vec<C<T>>,
    /// Nonzero frequencies and, per frequency, the (pattern slot, value)
    /// entries carrying that phase.
    frequencies: Vec<T>,
    groups: Vec<Vec<(usize, C<T>)>>,
    decay_half: Vec<T>,
    mode_decay: [T; 4],
    occupations: Vec<[usize; 4]>,
}

impl<T: Real> Generator<T> {
    fn new(h: &HamiltonianTerms<T>) -> Result<Self> {
        let dim = h.dim();
        let mut frequencies: Vec<T> = Vec::new();
        let mut groups: Vec<Vec<(usize, usize, C<T>)>> = Vec::new();
        for term in &h.terms {
            if !term.frequency.is_finite() || !term.coefficient.re.is_finite() || !term.coefficient.im.is_finite() {
                return Err(SimError::NonFinite { t: 0.0 });
            }
            let g = match frequencies.iter().position(|&f| f == term.frequency) {
                Some(g) => g,
                None => {
                    frequencies.push(term.frequency);
                    groups.push(Vec::new());
                    frequencies.len() - 1
                }
            };
            groups[g].extend(term.operator.triplets().map(|(r, c, v)| (r, c, v * term.coefficient)));
        }
        let merged: Vec<OperatorMatrix<T>> =
            groups.into_iter().map(|e| OperatorMatrix::from_triplets(dim, e)).collect();

        let mut pattern: Vec<Vec<usize>> = (0..dim).map(|i| vec![i]).collect();
        for m in &merged {
            for (r, c, _) in m.triplets() {
                pattern[r].push(c);
            }
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut diag_slots = Vec::with_capacity(dim);
        for (r, row) in pattern.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            diag_slots.push(cols.len() + row.binary_search(&r).expect("diagonal present"));
            cols.extend_from_slice(row);
            row_ptr.push(cols.len());
        }
        let slot = |r: usize, c: usize| {
            let span = row_ptr[r]..row_ptr[r + 1];
            span.start + cols[span].binary_search(&c).expect("entry in pattern")
        };
        let decay_half = h.decay_diagonal();
        if decay_half.iter().any(|d| !d.is_finite()) {
            return Err(SimError::NonFinite { t: 0.0 });
        }
        let mut base = vec![C::zero(); cols.len()];
        for (d, &k) in decay_half.iter().zip(&diag_slots) {
            base[k] = C::new(T::zero(), -*d);
        }
        let mut dyn_freqs = Vec::new();
        let mut groups = Vec::new();
        for (f, m) in frequencies.into_iter().zip(&merged) {
            if f == T::zero() {
                for (r, c, v) in m.triplets() {
                    let k = slot(r, c);
                    base[k] = base[k] + v;
                }
            } else {
                dyn_freqs.push(f);
                groups.push(m.triplets().map(|(r, c, v)| (slot(r, c), v)).collect());
            }
        }
        Ok(Self {
            dim,
            row_ptr,
            cols,
            base,
            frequencies: dyn_freqs,
            groups,
            decay_half,
            mode_decay: h.mode_decay,
            occupations: h.occupations.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pattern_len(&self) -> usize {
        self.cols.len()
    }

    pub fn mode_decay_rates(&self) -> [T; 4] {
        self.mode_decay
    }

    pub fn occupations(&self) -> &[[usize; 4]] {
        &self.occupations
    }

    pub fn has_decay(&self) -> bool {
        self.decay_half.iter().any(|&d| d > T::zero())
    }

    /// Largest |ω| among the time-dependent groups.
    pub fn max_frequency(&self) -> T {
        self.frequencies.iter().map(|f| f.abs()).fold(T::zero(), T::max)
    }

    /// Writes the values of H(t) (with D) on the shared pattern.
    pub fn assemble(&self, t: T, out: &mut [C<T>]) {
        out.copy_from_slice(&self.base);
        for (freq, entries) in self.frequencies.iter().zip(&self.groups) {
            let phase = C::from_polar(T::one(), *freq * t);
            for &(k, v) in entries {
                out[k] = out[k] + phase * v;
            }
        }
    }

    /// `y = H x` for assembled values `h`.
    pub fn matvec(&self, h: &[C<T>], x: &[C<T>], y: &mut [C<T>]) {
        for r in 0..self.dim {
            let mut acc = C::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + h[k] * x[self.cols[k]];
            }
            y[r] = acc;
        }
    }

    /// Row iterator over assembled values: (col, value).
    pub fn row<'a>(&'a self, h: &'a [C<T>], r: usize) -> impl Iterator<Item = (usize, C<T>)> + 'a {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], h[k]))
    }

    pub fn scratch(&self) -> Vec<C<T>> {
        vec![C::zero(); self.cols.len()]
    }

    pub fn summary(&self) -> String {
        format!(
            "dim={} pattern_nnz={} oscillating_groups={} max|freq|={}",
            self.dim,
            self.cols.len(),
            self.frequencies.len(),
            to_f64(self.max_frequency())
        )
    }
}
