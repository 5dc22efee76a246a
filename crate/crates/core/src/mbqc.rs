//! Measurement patterns on cluster states: adaptive single-qubit measurement
//! sequences, equal-time scheduling, Pauli-frame bookkeeping, and the
//! three-rotation chain that realizes an arbitrary SU(2) element.
//!
//! Convention, fixed once and validated against the 2x2 oracle in
//! [`predicted_unitary`]: measuring a chain qubit in the equatorial basis at
//! angle `phi` teleports `sigma_x^m H R_z(-phi)` onto its neighbour.  A step's
//! effective angle is `(-1)^(sum of x-dep outcomes) * base_angle + pi * (sum
//! of z-dep outcomes)`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim::{Gate2x2, OutcomeSource, QsimError, Statevector};

/// A qubit whose reduced density matrix sits within this distance (maximum
/// entry difference) of `|0><0|` or `|1><1|` counts as deterministic.
pub const DETERMINISTIC_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MbqcError {
    #[error("qubit {qubit} is measured by more than one step")]
    DuplicateQubit { qubit: usize },
    #[error("step {step} depends on step {dep}, which does not strictly precede it")]
    DependencyOrder { step: usize, dep: usize },
    #[error("step {step} lists dependency {dep} twice")]
    DuplicateDependency { step: usize, dep: usize },
    #[error("step {step} depends on readout step {dep}; readouts cannot feed angles")]
    DependencyOnReadout { step: usize, dep: usize },
    #[error("readout step {step} must not carry dependencies")]
    ReadoutWithDeps { step: usize },
    #[error("step {step} has a non-finite base angle")]
    BadAngle { step: usize },
    #[error("output qubit {qubit} listed twice")]
    DuplicateOutput { qubit: usize },
    #[error("output qubit {qubit} is consumed by a computational step")]
    OutputMeasuredComputationally { qubit: usize },
    #[error("output qubit {qubit} out of range for {n}-qubit register")]
    OutputOutOfRange { qubit: usize, n: usize },
    #[error("qubit {qubit} is not an output of this pattern")]
    NotAnOutput { qubit: usize },
    #[error("pattern JSON is malformed: {0}")]
    Parse(String),
    #[error(transparent)]
    State(#[from] QsimError),
}

/// Measurement flavour: computational steps measure in the equatorial
/// (x-y plane) basis, readout steps project onto the z basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Xy,
    Z,
}

/// One measurement instruction.  Dependencies are indices of earlier steps
/// whose outcomes modulate this step's angle: x-dependencies flip its sign,
/// z-dependencies shift it by pi.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementStep {
    pub qubit: usize,
    pub base_angle: f64,
    pub x_deps: Vec<usize>,
    pub z_deps: Vec<usize>,
    pub kind: StepKind,
}

impl MeasurementStep {
    pub fn computational(qubit: usize, base_angle: f64) -> Self {
        Self {
            qubit,
            base_angle,
            x_deps: Vec::new(),
            z_deps: Vec::new(),
            kind: StepKind::Xy,
        }
    }

    pub fn readout(qubit: usize) -> Self {
        Self {
            qubit,
            base_angle: 0.0,
            x_deps: Vec::new(),
            z_deps: Vec::new(),
            kind: StepKind::Z,
        }
    }

    pub fn with_x_deps(mut self, deps: Vec<usize>) -> Self {
        self.x_deps = deps;
        self
    }

    pub fn with_z_deps(mut self, deps: Vec<usize>) -> Self {
        self.z_deps = deps;
        self
    }
}

/// A validated measurement pattern: an ordered list of steps plus the output
/// qubits that stay quantum (or are z-read) at the end.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPattern {
    steps: Vec<MeasurementStep>,
    outputs: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepWire {
    q: usize,
    #[serde(default)]
    angle: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    xdep: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    zdep: Vec<usize>,
    kind: StepKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternWire {
    steps: Vec<StepWire>,
    outputs: Vec<usize>,
}

impl MeasurementPattern {
    /// Validates step ordering and output consistency:
    /// no qubit measured twice, dependencies strictly precede their step and
    /// point at computational steps, readouts carry no dependencies, and no
    /// output qubit is consumed computationally.
    pub fn new(steps: Vec<MeasurementStep>, outputs: Vec<usize>) -> Result<Self, MbqcError> {
        let mut measured = BTreeSet::new();
        for (i, step) in steps.iter().enumerate() {
            if !step.base_angle.is_finite() {
                return Err(MbqcError::BadAngle { step: i });
            }
            if !measured.insert(step.qubit) {
                return Err(MbqcError::DuplicateQubit { qubit: step.qubit });
            }
            if step.kind == StepKind::Z && !(step.x_deps.is_empty() && step.z_deps.is_empty()) {
                return Err(MbqcError::ReadoutWithDeps { step: i });
            }
            for deps in [&step.x_deps, &step.z_deps] {
                let mut seen = BTreeSet::new();
                for &dep in deps {
                    if dep >= i {
                        return Err(MbqcError::DependencyOrder { step: i, dep });
                    }
                    if !seen.insert(dep) {
                        return Err(MbqcError::DuplicateDependency { step: i, dep });
                    }
                    if steps[dep].kind == StepKind::Z {
                        return Err(MbqcError::DependencyOnReadout { step: i, dep });
                    }
                }
            }
        }
        let mut sorted_outputs = outputs;
        sorted_outputs.sort_unstable();
        for pair in sorted_outputs.windows(2) {
            if pair[0] == pair[1] {
                return Err(MbqcError::DuplicateOutput { qubit: pair[0] });
            }
        }
        for &out in &sorted_outputs {
            if steps
                .iter()
                .any(|s| s.qubit == out && s.kind == StepKind::Xy)
            {
                return Err(MbqcError::OutputMeasuredComputationally { qubit: out });
            }
        }
        Ok(Self {
            steps,
            outputs: sorted_outputs,
        })
    }

    pub fn steps(&self) -> &[MeasurementStep] {
        &self.steps
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Partitions step indices into equal-time sets.  A computational step's
    /// set index is one past the deepest of its dependencies (longest-chain
    /// leveling, so the number of sets is minimal), and all readout steps sit
    /// together in one final set: physically the readout happens after the
    /// computational phase, so every readout implicitly follows every
    /// computational step.
    pub fn schedule(&self) -> Vec<Vec<usize>> {
        let mut level = vec![0usize; self.steps.len()];
        let mut max_xy_level = 0;
        for (i, step) in self.steps.iter().enumerate() {
            if step.kind != StepKind::Xy {
                continue;
            }
            let dep_level = step
                .x_deps
                .iter()
                .chain(&step.z_deps)
                .map(|&d| level[d])
                .max()
                .unwrap_or(0);
            level[i] = dep_level + 1;
            max_xy_level = max_xy_level.max(level[i]);
        }
        let readout_level = max_xy_level + 1;
        let mut any_readout = false;
        for (i, step) in self.steps.iter().enumerate() {
            if step.kind == StepKind::Z {
                level[i] = readout_level;
                any_readout = true;
            }
        }
        let total = if any_readout { readout_level } else { max_xy_level };
        let mut sets = vec![Vec::new(); total];
        for (i, &lvl) in level.iter().enumerate() {
            sets[lvl - 1].push(i);
        }
        sets
    }

    pub fn to_json(&self) -> String {
        let wire = PatternWire {
            steps: self
                .steps
                .iter()
                .map(|s| StepWire {
                    q: s.qubit,
                    angle: s.base_angle,
                    xdep: s.x_deps.clone(),
                    zdep: s.z_deps.clone(),
                    kind: s.kind,
                })
                .collect(),
            outputs: self.outputs.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("pattern serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self, MbqcError> {
        let wire: PatternWire =
            serde_json::from_str(json).map_err(|e| MbqcError::Parse(e.to_string()))?;
        let steps = wire
            .steps
            .into_iter()
            .map(|s| MeasurementStep {
                qubit: s.q,
                base_angle: s.angle,
                x_deps: s.xdep,
                z_deps: s.zdep,
                kind: s.kind,
            })
            .collect();
        Self::new(steps, wire.outputs)
    }
}

/// Accumulated Pauli byproduct per output qubit: the uncorrected output
/// carries `sigma_x^x sigma_z^z` relative to the intended state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    powers: BTreeMap<usize, (u8, u8)>,
}

impl PauliFrame {
    /// Trivial frame (no byproducts) over the given output qubits.
    pub fn identity(outputs: &[usize]) -> Self {
        Self {
            powers: outputs.iter().map(|&q| (q, (0, 0))).collect(),
        }
    }

    pub fn x_power(&self, qubit: usize) -> Option<u8> {
        self.powers.get(&qubit).map(|&(x, _)| x)
    }

    pub fn z_power(&self, qubit: usize) -> Option<u8> {
        self.powers.get(&qubit).map(|&(_, z)| z)
    }

    fn advance(&mut self, qubit: usize, outcome: u8) {
        if let Some(entry) = self.powers.get_mut(&qubit) {
            entry.1 = entry.0;
            entry.0 = outcome;
        }
    }
}

/// The correction `sigma_x^x sigma_z^z` to apply (or account for) on an
/// output qubit before interpreting it.
pub fn byproduct_correction(frame: &PauliFrame, qubit: usize) -> Result<Gate2x2, MbqcError> {
    let (x, z) = frame
        .powers
        .get(&qubit)
        .copied()
        .ok_or(MbqcError::NotAnOutput { qubit })?;
    let mut g = Gate2x2::identity();
    if z & 1 == 1 {
        g = Gate2x2::sigma_z().matmul(&g);
    }
    if x & 1 == 1 {
        g = Gate2x2::sigma_x().matmul(&g);
    }
    Ok(g)
}

/// Closed-form 2x2 oracle for the four-qubit chain measured at fixed angles
/// `(-alpha, -beta, -gamma)` with outcomes `(m1, m2, m3)`:
///
/// `sigma_x^m3 sigma_z^m2 sigma_x^m1 H R_z((-1)^m2 gamma) R_x((-1)^m1 beta) R_z(alpha)`
///
/// With all outcomes zero this is the map an adaptive run realizes after
/// byproduct correction.
pub fn predicted_unitary(alpha: f64, beta: f64, gamma: f64, m1: u8, m2: u8, m3: u8) -> Gate2x2 {
    let sign = |m: u8| if m & 1 == 1 { -1.0 } else { 1.0 };
    let mut u = Gate2x2::rz(alpha);
    u = Gate2x2::rx(sign(m1) * beta).matmul(&u);
    u = Gate2x2::rz(sign(m2) * gamma).matmul(&u);
    u = Gate2x2::hadamard().matmul(&u);
    if m1 & 1 == 1 {
        u = Gate2x2::sigma_x().matmul(&u);
    }
    if m2 & 1 == 1 {
        u = Gate2x2::sigma_z().matmul(&u);
    }
    if m3 & 1 == 1 {
        u = Gate2x2::sigma_x().matmul(&u);
    }
    u
}

/// Adaptive pattern on a four-qubit chain (input on qubit 0, output on
/// qubit 3) realizing `H R_z(gamma) R_x(beta) R_z(alpha)` after byproduct
/// correction, independent of the measurement outcomes.  Each step flips its
/// angle on the previous outcome and shifts by pi on the one before that.
pub fn compile_su2_pattern(alpha: f64, beta: f64, gamma: f64) -> MeasurementPattern {
    MeasurementPattern::new(
        vec![
            MeasurementStep::computational(0, -alpha),
            MeasurementStep::computational(1, -beta).with_x_deps(vec![0]),
            MeasurementStep::computational(2, -gamma)
                .with_x_deps(vec![1])
                .with_z_deps(vec![0]),
        ],
        vec![3],
    )
    .expect("chain pattern is statically valid")
}

/// Record of one executed measurement step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// 1-based index of the equal-time set this step ran in.
    pub t: usize,
    pub step: usize,
    pub qubit: usize,
    pub kind: StepKind,
    /// Effective measurement angle; `None` for z readouts.
    pub effective_angle: Option<f64>,
    pub outcome: u8,
    pub probability: f64,
}

/// Everything a completed pattern run produces: per-step records, the final
/// Pauli frame, and the final state (measured qubits collapsed in place).
#[derive(Clone, Debug)]
pub struct RunTrace {
    pub steps: Vec<StepRecord>,
    pub frame: PauliFrame,
    pub state: Statevector,
    /// Number of equal-time sets executed.
    pub sets: usize,
}

/// Executes a pattern one equal-time set at a time, so callers can observe
/// the state between sets.
pub struct PatternExecutor {
    pattern: MeasurementPattern,
    sets: Vec<Vec<usize>>,
    state: Statevector,
    outcomes: Vec<Option<u8>>,
    records: Vec<StepRecord>,
    frame: PauliFrame,
    next_set: usize,
    readouts_executed: usize,
}

impl PatternExecutor {
    pub fn new(state: Statevector, pattern: MeasurementPattern) -> Result<Self, MbqcError> {
        let n = state.n_qubits();
        for step in pattern.steps() {
            if step.qubit >= n {
                return Err(QsimError::QubitOutOfRange {
                    qubit: step.qubit,
                    n,
                }
                .into());
            }
        }
        for &out in pattern.outputs() {
            if out >= n {
                return Err(MbqcError::OutputOutOfRange { qubit: out, n });
            }
        }
        let sets = pattern.schedule();
        let outcomes = vec![None; pattern.steps().len()];
        let frame = PauliFrame::identity(pattern.outputs());
        Ok(Self {
            pattern,
            sets,
            state,
            outcomes,
            records: Vec::new(),
            frame,
            next_set: 0,
            readouts_executed: 0,
        })
    }

    pub fn state(&self) -> &Statevector {
        &self.state
    }

    pub fn sets_total(&self) -> usize {
        self.sets.len()
    }

    pub fn is_done(&self) -> bool {
        self.next_set >= self.sets.len()
    }

    /// Number of z-readout steps executed so far.
    pub fn readouts_executed(&self) -> usize {
        self.readouts_executed
    }

    /// Qubits not yet measured by any executed step.
    pub fn unmeasured_qubits(&self) -> BTreeSet<usize> {
        let mut unmeasured: BTreeSet<usize> = (0..self.state.n_qubits()).collect();
        for record in &self.records {
            unmeasured.remove(&record.qubit);
        }
        unmeasured
    }

    fn effective_angle(&self, step: &MeasurementStep) -> f64 {
        let x_sum: u32 = step
            .x_deps
            .iter()
            .map(|&d| u32::from(self.outcomes[d].expect("dependency already executed")))
            .sum();
        let z_sum: u32 = step
            .z_deps
            .iter()
            .map(|&d| u32::from(self.outcomes[d].expect("dependency already executed")))
            .sum();
        let sign = if x_sum % 2 == 1 { -1.0 } else { 1.0 };
        sign * step.base_angle + std::f64::consts::PI * f64::from(z_sum % 2)
    }

    /// Runs the next equal-time set.  Returns `Ok(false)` when the pattern
    /// has already finished.
    pub fn run_next_set(&mut self, source: &mut dyn OutcomeSource) -> Result<bool, MbqcError> {
        if self.is_done() {
            return Ok(false);
        }
        let t = self.next_set + 1;
        let indices = self.sets[self.next_set].clone();
        for idx in indices {
            let step = self.pattern.steps()[idx].clone();
            let (effective_angle, outcome) = match step.kind {
                StepKind::Xy => {
                    let angle = self.effective_angle(&step);
                    let out = self.state.measure_xy(step.qubit, angle, source)?;
                    // Byproduct bookkeeping follows the linear teleportation
                    // flow, which is well-defined for single-output patterns.
                    if self.pattern.outputs().len() == 1 {
                        self.frame.advance(self.pattern.outputs()[0], out.bit);
                    }
                    (Some(angle), out)
                }
                StepKind::Z => {
                    let out = self.state.measure_z(step.qubit, source)?;
                    self.readouts_executed += 1;
                    (None, out)
                }
            };
            self.outcomes[idx] = Some(outcome.bit);
            self.records.push(StepRecord {
                t,
                step: idx,
                qubit: step.qubit,
                kind: step.kind,
                effective_angle,
                outcome: outcome.bit,
                probability: outcome.probability,
            });
        }
        self.next_set += 1;
        Ok(true)
    }

    pub fn finish(self) -> RunTrace {
        RunTrace {
            steps: self.records,
            frame: self.frame,
            state: self.state,
            sets: self.next_set,
        }
    }
}

/// Runs a whole pattern on a prepared state and returns the trace.
pub fn run(
    state: Statevector,
    pattern: MeasurementPattern,
    source: &mut dyn OutcomeSource,
) -> Result<RunTrace, MbqcError> {
    let mut exec = PatternExecutor::new(state, pattern)?;
    while exec.run_next_set(source)? {}
    Ok(exec.finish())
}

/// Unmeasured qubits whose reduced density matrix is already a z-basis
/// projector (within [`DETERMINISTIC_TOL`]), i.e. whose readout outcome is
/// certain.  Returned sorted as `(qubit, bit)` pairs.
pub fn deterministic_qubits(
    state: &Statevector,
    unmeasured: &BTreeSet<usize>,
) -> Result<Vec<(usize, u8)>, MbqcError> {
    let mut found = Vec::new();
    for &q in unmeasured {
        let rho = state.reduced_density(q)?;
        for bit in [0u8, 1u8] {
            let d = usize::from(bit);
            let on_diag = (rho[d][d].re - 1.0).abs().max(rho[d][d].im.abs());
            let off_diag = rho[0][1].norm().max(rho[1][0].norm());
            let other = rho[1 - d][1 - d].norm();
            if on_diag.max(off_diag).max(other) <= DETERMINISTIC_TOL {
                found.push((q, bit));
                break;
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen;
    use crate::qsim::ForcedOutcomes;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_input(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
        let raw = [
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        ];
        let norm = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
        [raw[0] / norm, raw[1] / norm]
    }

    /// Fidelity of the output qubit's reduced state against a target pure
    /// state; insensitive to global phase by construction.
    fn output_fidelity(state: &Statevector, qubit: usize, target: [Complex64; 2]) -> f64 {
        let rho = state.reduced_density(qubit).unwrap();
        let mut f = Complex64::new(0.0, 0.0);
        for r in 0..2 {
            for c in 0..2 {
                f += target[r].conj() * rho[r][c] * target[c];
            }
        }
        f.re
    }

    #[test]
    fn pattern_validation_catches_bad_wiring() {
        let dup = MeasurementPattern::new(
            vec![
                MeasurementStep::computational(0, 0.1),
                MeasurementStep::computational(0, 0.2),
            ],
            vec![],
        );
        assert_eq!(dup, Err(MbqcError::DuplicateQubit { qubit: 0 }));

        let forward = MeasurementPattern::new(
            vec![MeasurementStep::computational(0, 0.1).with_x_deps(vec![0])],
            vec![],
        );
        assert_eq!(forward, Err(MbqcError::DependencyOrder { step: 0, dep: 0 }));

        let consumed = MeasurementPattern::new(
            vec![MeasurementStep::computational(1, 0.1)],
            vec![1],
        );
        assert_eq!(
            consumed,
            Err(MbqcError::OutputMeasuredComputationally { qubit: 1 })
        );

        let on_readout = MeasurementPattern::new(
            vec![
                MeasurementStep::readout(0),
                MeasurementStep::computational(1, 0.0).with_x_deps(vec![0]),
            ],
            vec![],
        );
        assert_eq!(
            on_readout,
            Err(MbqcError::DependencyOnReadout { step: 1, dep: 0 })
        );
    }

    #[test]
    fn schedule_levels_follow_dependency_chains() {
        // Independent steps coalesce into one set.
        let flat = MeasurementPattern::new(
            vec![
                MeasurementStep::computational(0, 0.0),
                MeasurementStep::computational(1, 0.5),
                MeasurementStep::computational(2, 1.0),
            ],
            vec![3],
        )
        .unwrap();
        assert_eq!(flat.schedule(), vec![vec![0, 1, 2]]);

        // The rotation chain is fully sequential: three singleton sets.
        let chain = compile_su2_pattern(0.1, 0.2, 0.3);
        assert_eq!(chain.schedule(), vec![vec![0], vec![1], vec![2]]);

        // Readouts land together in one final set after every computational
        // step, even without explicit dependencies.
        let with_readout = MeasurementPattern::new(
            vec![
                MeasurementStep::computational(0, 0.0),
                MeasurementStep::readout(1),
                MeasurementStep::computational(2, 0.0).with_x_deps(vec![0]),
                MeasurementStep::readout(3),
            ],
            vec![1, 3],
        )
        .unwrap();
        assert_eq!(with_readout.schedule(), vec![vec![0], vec![2], vec![1, 3]]);
    }

    #[test]
    fn predicted_unitary_base_cases() {
        // All-zero outcomes at zero angles leave just the Hadamard.
        let h = predicted_unitary(0.0, 0.0, 0.0, 0, 0, 0);
        for (row, expect) in h.entries().iter().zip(Gate2x2::hadamard().entries()) {
            for (a, b) in row.iter().zip(expect) {
                assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
                assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-15);
            }
        }
        // m1 = 1 flips the sign of beta inside R_x and prefixes sigma_x.
        let got = predicted_unitary(0.0, 0.7, 0.0, 1, 0, 0);
        let want = Gate2x2::sigma_x()
            .matmul(&Gate2x2::hadamard())
            .matmul(&Gate2x2::rx(-0.7));
        for (row, expect) in got.entries().iter().zip(want.entries()) {
            for (a, b) in row.iter().zip(expect) {
                assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
                assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn teleport_pattern_applies_hadamard() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for forced in [0u8, 1u8] {
            let input = random_input(&mut rng);
            let graph = graphgen::build_path(2).unwrap();
            let state = graphgen::prepare_cluster_with_input(&graph, input).unwrap();
            let pattern = MeasurementPattern::new(
                vec![MeasurementStep::computational(0, 0.0)],
                vec![1],
            )
            .unwrap();
            let mut source = ForcedOutcomes::single(forced);
            let trace = run(state, pattern, &mut source).unwrap();
            assert_eq!(trace.frame.x_power(1), Some(forced));
            assert_eq!(trace.frame.z_power(1), Some(0));
            assert_abs_diff_eq!(trace.steps[0].probability, 0.5, epsilon = 1e-12);
            let mut expected = Gate2x2::hadamard().apply(input);
            if forced == 1 {
                expected = Gate2x2::sigma_x().apply(expected);
            }
            let fidelity = output_fidelity(&trace.state, 1, expected);
            assert!(fidelity >= 1.0 - 1e-12, "fidelity {fidelity}");
        }
    }

    #[test]
    fn adaptive_chain_is_deterministic_after_correction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let (alpha, beta, gamma) = (
                rng.random::<f64>() * 4.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
            );
            let input = random_input(&mut rng);
            let target = predicted_unitary(alpha, beta, gamma, 0, 0, 0).apply(input);
            for m in 0u8..8 {
                let bits = vec![m & 1, (m >> 1) & 1, (m >> 2) & 1];
                let graph = graphgen::build_path(4).unwrap();
                let state = graphgen::prepare_cluster_with_input(&graph, input).unwrap();
                let pattern = compile_su2_pattern(alpha, beta, gamma);
                let mut source = ForcedOutcomes::new(bits);
                let trace = run(state, pattern, &mut source).unwrap();
                let correction = byproduct_correction(&trace.frame, 3).unwrap();
                let mut corrected = trace.state.clone();
                corrected.apply_1q(3, &correction).unwrap();
                let fidelity = output_fidelity(&corrected, 3, target);
                assert!(
                    fidelity >= 1.0 - 1e-10,
                    "outcomes {m:03b}: fidelity {fidelity}"
                );
            }
        }
    }

    #[test]
    fn fixed_angle_chain_reproduces_the_oracle_outcome_by_outcome() {
        // Strip the dependencies: measuring at the raw angles realizes the
        // oracle's outcome-dependent matrix directly, byproducts included.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (alpha, beta, gamma) = (0.733, -1.21, 2.02);
        for m in 0u8..8 {
            let (m1, m2, m3) = (m & 1, (m >> 1) & 1, (m >> 2) & 1);
            let input = random_input(&mut rng);
            let graph = graphgen::build_path(4).unwrap();
            let state = graphgen::prepare_cluster_with_input(&graph, input).unwrap();
            let pattern = MeasurementPattern::new(
                vec![
                    MeasurementStep::computational(0, -alpha),
                    MeasurementStep::computational(1, -beta),
                    MeasurementStep::computational(2, -gamma),
                ],
                vec![3],
            )
            .unwrap();
            let mut source = ForcedOutcomes::new(vec![m1, m2, m3]);
            let trace = run(state, pattern, &mut source).unwrap();
            let expected = predicted_unitary(alpha, beta, gamma, m1, m2, m3).apply(input);
            let fidelity = output_fidelity(&trace.state, 3, expected);
            assert!(
                fidelity >= 1.0 - 1e-10,
                "outcomes ({m1},{m2},{m3}): fidelity {fidelity}"
            );
        }
    }

    #[test]
    fn byproduct_correction_matrices() {
        let mut frame = PauliFrame::identity(&[2]);
        let id = byproduct_correction(&frame, 2).unwrap();
        assert_eq!(id.entries(), Gate2x2::identity().entries());

        frame.advance(2, 1);
        let x = byproduct_correction(&frame, 2).unwrap();
        assert_eq!(x.entries(), Gate2x2::sigma_x().entries());

        frame.advance(2, 1);
        let xz = byproduct_correction(&frame, 2).unwrap();
        let expected = Gate2x2::sigma_x().matmul(&Gate2x2::sigma_z());
        assert_eq!(xz.entries(), expected.entries());

        assert_eq!(
            byproduct_correction(&frame, 0),
            Err(MbqcError::NotAnOutput { qubit: 0 })
        );
    }

    #[test]
    fn deterministic_qubits_on_fresh_and_collapsed_states() {
        let graph = graphgen::build_ring(4).unwrap();
        let state = graphgen::prepare_cluster(&graph).unwrap();
        let all: BTreeSet<usize> = (0..4).collect();
        assert!(deterministic_qubits(&state, &all).unwrap().is_empty());

        // Measuring qubit 0 of a 3-chain at angle 0 with outcome 0 teleports
        // H|+> = |0> onto qubit 1, whose readout becomes certain.
        let graph = graphgen::build_path(3).unwrap();
        let mut state = graphgen::prepare_cluster(&graph).unwrap();
        let mut source = ForcedOutcomes::single(0);
        state.measure_xy(0, 0.0, &mut source).unwrap();
        let unmeasured: BTreeSet<usize> = [1, 2].into_iter().collect();
        assert_eq!(
            deterministic_qubits(&state, &unmeasured).unwrap(),
            vec![(1, 0)]
        );
    }

    #[test]
    fn pattern_json_round_trip_and_validation() {
        let pattern = compile_su2_pattern(0.25, -0.5, 1.0);
        let json = pattern.to_json();
        let back = MeasurementPattern::from_json(&json).unwrap();
        assert_eq!(pattern, back);

        let bad = r#"{"steps": [{"q": 0, "angle": 0.0, "kind": "xy", "typo": 1}], "outputs": []}"#;
        let err = MeasurementPattern::from_json(bad).unwrap_err();
        assert!(matches!(err, MbqcError::Parse(msg) if msg.contains("typo")));

        let inconsistent = r#"{"steps": [{"q": 1, "angle": 0.0, "kind": "xy"}], "outputs": [1]}"#;
        assert_eq!(
            MeasurementPattern::from_json(inconsistent),
            Err(MbqcError::OutputMeasuredComputationally { qubit: 1 })
        );
    }
}
