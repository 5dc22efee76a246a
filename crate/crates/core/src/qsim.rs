//! Dense statevector simulator for small qubit registers.
//!
//! Qubit 0 is the least significant bit of the amplitude index, so the basis
//! state `|q_{n-1} .. q_1 q_0>` lives at index `sum_k q_k 2^k`.  Registers are
//! capped at [`MAX_QUBITS`] qubits and every operation that returns a state
//! keeps it normalized to 1 within 1e-12.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Hard cap on register size.  At 2^26 amplitudes (one `Complex64` each) a
/// register occupies 1 GiB, the largest this dense representation should hold.
pub const MAX_QUBITS: usize = 26;

/// Tolerance for the unitarity check performed on every [`Gate2x2`].
pub const UNITARY_TOL: f64 = 1e-12;

/// Forced measurement outcomes whose Born probability falls below this
/// threshold are rejected instead of renormalizing a near-zero branch.
pub const IMPOSSIBLE_OUTCOME_TOL: f64 = 1e-12;

/// Tolerance for state normalization checks on externally supplied amplitudes.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("register size {n} outside supported range 1..=26")]
    BadRegisterSize { n: usize },
    #[error("qubit index {qubit} out of range for {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("two-qubit gate endpoints must differ (got qubit {qubit} twice)")]
    IdenticalQubits { qubit: usize },
    #[error("matrix is not unitary within 1e-12")]
    NotUnitary,
    #[error("amplitude vector of length {len} is not a 1..=26 qubit register")]
    BadAmplitudeCount { len: usize },
    #[error("state norm^2 {norm_sqr} differs from 1 by more than 1e-12")]
    NotNormalized { norm_sqr: f64 },
    #[error(
        "forced outcome {bit} on qubit {qubit} has Born probability {probability:.3e}, below 1e-12"
    )]
    ImpossibleOutcome { qubit: usize, bit: u8, probability: f64 },
    #[error("statevector dimensions differ ({left} vs {right} qubits)")]
    DimensionMismatch { left: usize, right: usize },
}

/// Kahan-compensated accumulator so that norm and probability sums stay
/// accurate to a few ulps even over 2^26 terms.
#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// A validated 2x2 unitary.  [`Gate2x2::new`] rejects matrices that are not
/// unitary within [`UNITARY_TOL`]; the named constructors and products of
/// validated gates are unitary by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate2x2 {
    m: [[Complex64; 2]; 2],
}

impl Gate2x2 {
    /// Builds a gate from row-major entries, checking `U^dag U = I`.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self, QsimError> {
        for row in 0..2 {
            for col in 0..2 {
                let mut entry = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    entry += m[k][row].conj() * m[k][col];
                }
                let expect = if row == col { 1.0 } else { 0.0 };
                if (entry - expect).norm() > UNITARY_TOL {
                    return Err(QsimError::NotUnitary);
                }
            }
        }
        Ok(Self { m })
    }

    fn raw(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::raw([[one, zero], [zero, one]])
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::raw([[h, h], [h, -h]])
    }

    pub fn sigma_x() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::raw([[zero, one], [one, zero]])
    }

    pub fn sigma_z() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::raw([[one, zero], [zero, -one]])
    }

    /// `R_z(phi) = exp(-i phi Z / 2)`.
    pub fn rz(phi: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::raw([
            [Complex64::from_polar(1.0, -phi / 2.0), zero],
            [zero, Complex64::from_polar(1.0, phi / 2.0)],
        ])
    }

    /// `R_x(phi) = exp(-i phi X / 2)`.
    pub fn rx(phi: f64) -> Self {
        let c = Complex64::new((phi / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(phi / 2.0).sin());
        Self::raw([[c, s], [s, c]])
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn matmul(&self, rhs: &Gate2x2) -> Gate2x2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = self.m[r][0] * rhs.m[0][c] + self.m[r][1] * rhs.m[1][c];
            }
        }
        Gate2x2::raw(out)
    }

    pub fn dagger(&self) -> Gate2x2 {
        Gate2x2::raw([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    /// Applies the gate to a single-qubit amplitude pair.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }
}

/// Outcome of a single projective measurement: the reported bit and the Born
/// probability the state assigned to it just before collapse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub bit: u8,
    pub probability: f64,
}

/// Supplies measurement outcomes to the simulator.  A source either samples
/// bits (seeded, reproducible) or forces a prescribed outcome string so that
/// every measurement branch can be explored deterministically.
pub trait OutcomeSource {
    /// Chooses the next outcome bit given the Born probability of bit 0.
    fn next_bit(&mut self, prob_zero: f64) -> u8;
}

/// Draws outcomes from a ChaCha stream; the same seed replays the same run.
pub struct SeededOutcomes {
    rng: ChaCha8Rng,
}

impl SeededOutcomes {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl OutcomeSource for SeededOutcomes {
    fn next_bit(&mut self, prob_zero: f64) -> u8 {
        if self.rng.random::<f64>() < prob_zero {
            0
        } else {
            1
        }
    }
}

/// Replays a fixed outcome string, one bit per measurement.
///
/// Panics if more outcomes are requested than were provided; running out of
/// forced bits is a harness bug, not a recoverable condition.
pub struct ForcedOutcomes {
    bits: Vec<u8>,
    cursor: usize,
}

impl ForcedOutcomes {
    pub fn new(bits: Vec<u8>) -> Self {
        Self { bits, cursor: 0 }
    }

    pub fn single(bit: u8) -> Self {
        Self::new(vec![bit])
    }
}

impl OutcomeSource for ForcedOutcomes {
    fn next_bit(&mut self, _prob_zero: f64) -> u8 {
        let bit = *self
            .bits
            .get(self.cursor)
            .expect("forced outcome string exhausted");
        self.cursor += 1;
        bit & 1
    }
}

/// Dense statevector over `n` qubits.
#[derive(Clone, Debug)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    fn check_size(n: usize) -> Result<(), QsimError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(QsimError::BadRegisterSize { n });
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), QsimError> {
        if qubit >= self.n {
            return Err(QsimError::QubitOutOfRange { qubit, n: self.n });
        }
        Ok(())
    }

    /// `|+>^n`: every amplitude equals `2^(-n/2)`.
    pub fn plus_state(n: usize) -> Result<Self, QsimError> {
        Self::check_size(n)?;
        let amp = Complex64::new(1.0 / ((1u64 << n) as f64).sqrt(), 0.0);
        Ok(Self {
            n,
            amps: vec![amp; 1 << n],
        })
    }

    /// `|input> (x) |+>^(n-1)` with the injected state on qubit 0.  Used to
    /// feed an arbitrary input into a cluster before entangling.
    pub fn plus_state_with_input(n: usize, input: [Complex64; 2]) -> Result<Self, QsimError> {
        Self::check_size(n)?;
        let norm_sqr = input[0].norm_sqr() + input[1].norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalized { norm_sqr });
        }
        let rest = 1.0 / ((1u64 << (n - 1)) as f64).sqrt();
        let amps = (0..1usize << n)
            .map(|z| input[z & 1] * rest)
            .collect();
        Ok(Self { n, amps })
    }

    /// Builds a state from raw amplitudes (length a power of two, norm 1).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QsimError::BadAmplitudeCount { len });
        }
        let n = len.trailing_zeros() as usize;
        Self::check_size(n)?;
        let state = Self { n, amps };
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalized { norm_sqr });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = Kahan::default();
        for a in &self.amps {
            acc.add(a.norm_sqr());
        }
        acc.value()
    }

    /// Applies a single-qubit gate in place.  Preserves the norm to within
    /// the gate's own unitarity tolerance.
    pub fn apply_1q(&mut self, qubit: usize, gate: &Gate2x2) -> Result<(), QsimError> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let m = gate.entries();
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
        }
        Ok(())
    }

    /// Controlled-Z between two qubits: negates amplitudes where both bits
    /// are set.  Pure sign flips, so any application order of a set of CZ
    /// gates produces bit-identical amplitudes.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<(), QsimError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(QsimError::IdenticalQubits { qubit: a });
        }
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    fn branch_probabilities(&self, qubit: usize) -> (f64, f64) {
        let mask = 1usize << qubit;
        let mut p0 = Kahan::default();
        let mut p1 = Kahan::default();
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                p0.add(a.norm_sqr());
            } else {
                p1.add(a.norm_sqr());
            }
        }
        (p0.value(), p1.value())
    }

    /// Projective z-basis measurement of one qubit.  The chosen branch is
    /// renormalized in place and the measured qubit is left in `|bit>`.
    pub fn measure_z(
        &mut self,
        qubit: usize,
        source: &mut dyn OutcomeSource,
    ) -> Result<MeasurementOutcome, QsimError> {
        self.check_qubit(qubit)?;
        let (p0, p1) = self.branch_probabilities(qubit);
        let bit = source.next_bit(p0) & 1;
        let probability = if bit == 0 { p0 } else { p1 };
        if probability < IMPOSSIBLE_OUTCOME_TOL {
            return Err(QsimError::ImpossibleOutcome {
                qubit,
                bit,
                probability,
            });
        }
        let mask = 1usize << qubit;
        let keep = if bit == 0 { 0 } else { mask };
        let scale = 1.0 / probability.sqrt();
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == keep {
                *amp *= scale;
            } else {
                *amp = Complex64::new(0.0, 0.0);
            }
        }
        Ok(MeasurementOutcome { bit, probability })
    }

    /// Measurement in the equatorial basis `(|0> +/- e^{i phi} |1>)/sqrt(2)`
    /// (bit 0 for `+`, bit 1 for `-`).  Outcome statistics and the collapsed
    /// state of the other qubits follow the projection onto that basis; the
    /// measured qubit itself is left in `|bit>`, so `phi = 0` coincides
    /// exactly with a Hadamard followed by [`Statevector::measure_z`].
    pub fn measure_xy(
        &mut self,
        qubit: usize,
        phi: f64,
        source: &mut dyn OutcomeSource,
    ) -> Result<MeasurementOutcome, QsimError> {
        self.check_qubit(qubit)?;
        // W maps |0>,|1> to the basis states; applying W^dag rotates the
        // measurement into the computational basis.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e = Complex64::from_polar(h, -phi);
        let w_dag = Gate2x2::raw([
            [Complex64::new(h, 0.0), e],
            [Complex64::new(h, 0.0), -e],
        ]);
        self.apply_1q(qubit, &w_dag)?;
        self.measure_z(qubit, source)
    }

    /// Single-qubit reduced density matrix (row-major, `rho[row][col]`).
    /// Hermitian with unit trace by construction.
    pub fn reduced_density(&self, qubit: usize) -> Result<[[Complex64; 2]; 2], QsimError> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let mut rho00 = Kahan::default();
        let mut rho11 = Kahan::default();
        let mut rho01_re = Kahan::default();
        let mut rho01_im = Kahan::default();
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a = self.amps[i];
                let b = self.amps[j];
                rho00.add(a.norm_sqr());
                rho11.add(b.norm_sqr());
                let cross = a * b.conj();
                rho01_re.add(cross.re);
                rho01_im.add(cross.im);
            }
        }
        let rho01 = Complex64::new(rho01_re.value(), rho01_im.value());
        Ok([
            [Complex64::new(rho00.value(), 0.0), rho01],
            [rho01.conj(), Complex64::new(rho11.value(), 0.0)],
        ])
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64, QsimError> {
        if self.n != other.n {
            return Err(QsimError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for (a, b) in self.amps.iter().zip(&other.amps) {
            let term = a.conj() * b;
            re.add(term.re);
            im.add(term.im);
        }
        Ok(Complex64::new(re.value(), im.value()))
    }

    /// True when the states agree up to a global phase: `|<a|b>| >= 1 - tol`.
    pub fn equal_up_to_phase(&self, other: &Statevector, tol: f64) -> Result<bool, QsimError> {
        Ok(self.inner(other)?.norm() >= 1.0 - tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_input(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
        let raw = [
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        ];
        let norm = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
        [raw[0] / norm, raw[1] / norm]
    }

    #[test]
    fn gate_constructor_rejects_non_unitary() {
        let bad = Gate2x2::new([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]]);
        assert_eq!(bad, Err(QsimError::NotUnitary));
        let scaled = Gate2x2::new([[c(1.0 + 1e-6, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        assert_eq!(scaled, Err(QsimError::NotUnitary));
    }

    #[test]
    fn named_gates_pass_their_own_unitarity_check() {
        for g in [
            Gate2x2::identity(),
            Gate2x2::hadamard(),
            Gate2x2::sigma_x(),
            Gate2x2::sigma_z(),
            Gate2x2::rz(0.7),
            Gate2x2::rx(-1.3),
        ] {
            assert!(Gate2x2::new(*g.entries()).is_ok());
        }
    }

    #[test]
    fn rotation_composition_matches_matrix_product() {
        // Apply R_z(0.3), then R_x(1.1), then R_z(-0.4) to |0> and compare
        // with the direct product of the three matrices acting on (1, 0).
        let mut state = Statevector::from_amplitudes(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        state.apply_1q(0, &Gate2x2::rz(0.3)).unwrap();
        state.apply_1q(0, &Gate2x2::rx(1.1)).unwrap();
        state.apply_1q(0, &Gate2x2::rz(-0.4)).unwrap();
        let product = Gate2x2::rz(-0.4)
            .matmul(&Gate2x2::rx(1.1))
            .matmul(&Gate2x2::rz(0.3));
        let expected = product.apply([c(1.0, 0.0), c(0.0, 0.0)]);
        for (got, want) in state.amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-14);
            assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn plus_state_amplitudes_and_norm() {
        let state = Statevector::plus_state(3).unwrap();
        for a in state.amplitudes() {
            assert_abs_diff_eq!(a.re, 1.0 / 8f64.sqrt(), epsilon = 1e-15);
            assert_eq!(a.im, 0.0);
        }
        assert!(Statevector::plus_state(0).is_err());
        assert!(Statevector::plus_state(27).is_err());
    }

    #[test]
    fn plus_state_norm_stays_tight_at_twenty_qubits() {
        let state = Statevector::plus_state(20).unwrap();
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cz_on_plus_plus_entangles() {
        // CZ |+>|+> = (|0>|+> + |1>|->)/sqrt(2); qubit 0 is the first factor.
        let mut state = Statevector::plus_state(2).unwrap();
        state.apply_cz(0, 1).unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-15);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn cz_rejects_identical_and_out_of_range_qubits() {
        let mut state = Statevector::plus_state(2).unwrap();
        assert_eq!(
            state.apply_cz(1, 1),
            Err(QsimError::IdenticalQubits { qubit: 1 })
        );
        assert_eq!(
            state.apply_cz(0, 2),
            Err(QsimError::QubitOutOfRange { qubit: 2, n: 2 })
        );
    }

    #[test]
    fn teleportation_step_produces_rotated_input() {
        // Input on qubit 0, |+> on qubit 1, CZ, Hadamard on qubit 0, z-measure
        // qubit 0: outcome m leaves qubit 1 in sigma_x^m H |psi>.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let input = random_input(&mut rng);
            for forced in [0u8, 1u8] {
                let mut state = Statevector::plus_state_with_input(2, input).unwrap();
                state.apply_cz(0, 1).unwrap();
                state.apply_1q(0, &Gate2x2::hadamard()).unwrap();
                let mut source = ForcedOutcomes::single(forced);
                let outcome = state.measure_z(0, &mut source).unwrap();
                assert_eq!(outcome.bit, forced);
                assert_abs_diff_eq!(outcome.probability, 0.5, epsilon = 1e-12);
                let mut expected = Gate2x2::hadamard().apply(input);
                if forced == 1 {
                    expected = Gate2x2::sigma_x().apply(expected);
                }
                // Qubit 0 collapsed to |forced>, so qubit 1's pair sits at
                // indices {forced, forced + 2}.
                let amps = state.amplitudes();
                let got = [amps[forced as usize], amps[forced as usize + 2]];
                let overlap = (expected[0].conj() * got[0] + expected[1].conj() * got[1]).norm();
                assert!(overlap >= 1.0 - 1e-12, "overlap {overlap}");
            }
        }
    }

    #[test]
    fn measure_xy_at_zero_equals_hadamard_then_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let input = random_input(&mut rng);
            for forced in [0u8, 1u8] {
                let mut via_xy = Statevector::plus_state_with_input(3, input).unwrap();
                via_xy.apply_cz(0, 1).unwrap();
                via_xy.apply_cz(1, 2).unwrap();
                let mut via_h = via_xy.clone();

                let mut src = ForcedOutcomes::single(forced);
                let got_xy = via_xy.measure_xy(1, 0.0, &mut src).unwrap();

                via_h.apply_1q(1, &Gate2x2::hadamard()).unwrap();
                let mut src = ForcedOutcomes::single(forced);
                let got_h = via_h.measure_z(1, &mut src).unwrap();

                assert_abs_diff_eq!(got_xy.probability, got_h.probability, epsilon = 1e-12);
                for (a, b) in via_xy.amplitudes().iter().zip(via_h.amplitudes()) {
                    assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-13);
                    assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn impossible_forced_outcome_is_rejected() {
        // |+> has zero weight on the minus branch at phi = 0.
        let mut state = Statevector::plus_state(1).unwrap();
        let mut source = ForcedOutcomes::single(1);
        let err = state.measure_xy(0, 0.0, &mut source).unwrap_err();
        assert!(matches!(err, QsimError::ImpossibleOutcome { bit: 1, .. }));
    }

    #[test]
    fn measurement_renormalizes_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut state = Statevector::plus_state(4).unwrap();
        for (a, b) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            state.apply_cz(a, b).unwrap();
        }
        let mut source = SeededOutcomes::new(99);
        for q in 0..3 {
            state.measure_xy(q, rng.random::<f64>(), &mut source).unwrap();
            assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_density_of_cluster_qubit_is_maximally_mixed() {
        let mut state = Statevector::plus_state(2).unwrap();
        state.apply_cz(0, 1).unwrap();
        for q in 0..2 {
            let rho = state.reduced_density(q).unwrap();
            assert_abs_diff_eq!(rho[0][0].re, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(rho[1][1].re, 0.5, epsilon = 1e-12);
            assert!(rho[0][1].norm() < 1e-12);
        }
    }

    #[test]
    fn equal_up_to_phase_accepts_global_phase_and_rejects_orthogonal() {
        let state = Statevector::plus_state(2).unwrap();
        let phased = Statevector::from_amplitudes(
            state
                .amplitudes()
                .iter()
                .map(|a| a * Complex64::from_polar(1.0, 1.234))
                .collect(),
        )
        .unwrap();
        assert!(state.equal_up_to_phase(&phased, 1e-10).unwrap());

        let mut flipped = state.clone();
        // sigma_z sends |+> to |->, an orthogonal state.
        flipped.apply_1q(0, &Gate2x2::sigma_z()).unwrap();
        assert!(!state.equal_up_to_phase(&flipped, 1e-10).unwrap());

        let other = Statevector::plus_state(3).unwrap();
        assert!(state.equal_up_to_phase(&other, 1e-10).is_err());
    }

    #[test]
    fn from_amplitudes_validates_shape_and_norm() {
        assert!(matches!(
            Statevector::from_amplitudes(vec![c(1.0, 0.0); 3]),
            Err(QsimError::BadAmplitudeCount { len: 3 })
        ));
        assert!(matches!(
            Statevector::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(QsimError::NotNormalized { .. })
        ));
    }
}
