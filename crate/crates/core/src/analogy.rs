//! Thermodynamic bookkeeping for cluster-state computation: computational
//! potential, brute-force computational capacity, the information order
//! parameter, critical-time scaling with lattice dimension, and instrumented
//! pattern runs that record all of these per equal-time step.
//!
//! Units: entanglement `E` is a remaining-edge count, capacity `C` is a
//! natural log of a choice count (dimensionless), information `I` is a count
//! of retrieved output bits, and the potential `P = E - C/t` inherits the
//! units of `E`.  Proportionality constants left free by the defining
//! relations are fixed to 1 throughout.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::entanglement::remaining_entanglement;
use crate::graphgen::{prepare_cluster, Graph, GraphError};
use crate::mbqc::{deterministic_qubits, MbqcError, MeasurementPattern, PatternExecutor};
use crate::qsim::{OutcomeSource, Statevector};

/// Largest unmeasured-vertex count accepted by [`capacity_bruteforce`].
pub const ENUMERATION_BOUND: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalogyError {
    #[error("time index must be at least 1, got {t}")]
    BadTime { t: u64 },
    #[error("lattice dimension must be at least 2, got {d}")]
    BadDimension { d: u64 },
    #[error("chain length must be at least 2, got {n}")]
    ChainTooShort { n: u64 },
    #[error("{unmeasured} unmeasured vertices exceed the enumeration bound of {bound}")]
    EnumerationBound { unmeasured: usize, bound: usize },
    #[error("measured vertex {vertex} is outside a graph on {n} vertices")]
    MeasuredOutOfRange { vertex: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pattern(#[from] MbqcError),
}

/// Computational potential `P = E - C/t` for entanglement `E`, capacity `C`,
/// and time index `t >= 1`.  A capacity of negative infinity (no admissible
/// move) yields `P = +infinity`.
pub fn computational_potential(e: f64, c: f64, t: u64) -> Result<f64, AnalogyError> {
    if t < 1 {
        return Err(AnalogyError::BadTime { t });
    }
    Ok(e - c / t as f64)
}

/// A capacity question: on `graph`, with `measured` vertices already gone,
/// how many single-vertex measurement choices would consume exactly
/// `delta_e` edges?
#[derive(Clone, Debug)]
pub struct CapacityQuery<'a> {
    pub graph: &'a Graph,
    pub measured: &'a BTreeSet<usize>,
    pub delta_e: usize,
}

/// Natural log of the number of unmeasured vertices whose incident edge
/// count, within the unmeasured subgraph, equals `delta_e`.  Returns negative
/// infinity when no vertex qualifies, and an error when the unmeasured count
/// exceeds [`ENUMERATION_BOUND`].
pub fn capacity_bruteforce(query: &CapacityQuery<'_>) -> Result<f64, AnalogyError> {
    let n = query.graph.n_vertices();
    if let Some(&vertex) = query.measured.iter().find(|&&v| v >= n) {
        return Err(AnalogyError::MeasuredOutOfRange { vertex, n });
    }
    let unmeasured: Vec<usize> = (0..n).filter(|v| !query.measured.contains(v)).collect();
    if unmeasured.len() > ENUMERATION_BOUND {
        return Err(AnalogyError::EnumerationBound {
            unmeasured: unmeasured.len(),
            bound: ENUMERATION_BOUND,
        });
    }
    let count = unmeasured
        .iter()
        .filter(|&&v| consumed_edges(query.graph, query.measured, v) == query.delta_e)
        .count();
    Ok(if count == 0 {
        f64::NEG_INFINITY
    } else {
        (count as f64).ln()
    })
}

/// Edges a measurement of `vertex` would consume right now: incident edges
/// whose other endpoint is still unmeasured.
fn consumed_edges(graph: &Graph, measured: &BTreeSet<usize>, vertex: usize) -> usize {
    graph
        .edges()
        .iter()
        .filter(|&&(a, b)| {
            (a == vertex && !measured.contains(&b)) || (b == vertex && !measured.contains(&a))
        })
        .count()
}

/// Number of adjacent pairs that could be the last entangled pair of a 1D
/// chain, under both boundary conditions.  The two counts agree to `ln`
/// accuracy for large `n` (`ln(n-1) - ln n -> 0`), so the headline capacity
/// change `ln n` is asymptotically exact either way.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FinalStepOrigins {
    pub open: u64,
    pub ring: u64,
}

pub fn final_step_origins_1d(n: u64) -> Result<FinalStepOrigins, AnalogyError> {
    if n < 2 {
        return Err(AnalogyError::ChainTooShort { n });
    }
    Ok(FinalStepOrigins {
        open: n - 1,
        ring: n,
    })
}

/// Potential change `1 - ln(n)/t` booked for the final disentangling step of
/// an `n`-spin chain: one unit of entanglement spent, `ln n` of capacity
/// gained over `t` time steps.  Crosses zero at `t = ln n` and is negative
/// only for `n > e^t`.  Callers supply `n >= 2` and `t > 0`.
pub fn delta_p_1d(n: u64, t: f64) -> f64 {
    1.0 - (n as f64).ln() / t
}

/// Critical-time scale `ln(d)/d` for a cluster computer on a `d`-dimensional
/// lattice (proportionality constant 1).  Defined for `d >= 2`; note the
/// formula is not monotone at the low end (`ln 2/2 = ln 4/4 < ln 3/3`), so
/// "higher dimension is faster" holds only from `d = 3` up.
pub fn t_crit_dim(d: u64) -> Result<f64, AnalogyError> {
    if d < 2 {
        return Err(AnalogyError::BadDimension { d });
    }
    Ok((d as f64).ln() / d as f64)
}

/// Retrieved information in bits: outputs already read out plus unmeasured
/// qubits (callers pass the unread outputs) that sit in a z-basis eigenstate
/// and are therefore already decided.
pub fn information_bits(
    state: &Statevector,
    unmeasured: &BTreeSet<usize>,
    already_read: usize,
) -> Result<usize, AnalogyError> {
    Ok(already_read + deterministic_qubits(state, unmeasured)?.len())
}

/// One row of an instrumented run: the state of play after equal-time set
/// `t`.  `c` and `p` are absent at `t = 0` (no step has been taken and `P`
/// is undefined there) and whenever capacity tracking is disabled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    /// Equal-time set index, 0 for the pre-run snapshot.
    pub t: usize,
    /// Remaining edges among unmeasured qubits.
    pub e: usize,
    /// Capacity of the set just executed: log count of single-vertex choices
    /// on the pre-set graph that consume exactly the drop this set realized.
    /// Negative infinity when the set consumed more than any one vertex
    /// could (for example a multi-qubit readout set).
    pub c: Option<f64>,
    /// Retrieved output bits.
    pub i: usize,
    /// Computational potential `e - c/t`.
    pub p: Option<f64>,
}

/// Full instrumented run of a measurement pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalogyTrace {
    pub records: Vec<TraceRecord>,
    /// First set index at which any output information exists.
    pub t_crit: Option<usize>,
    /// Final set index.
    pub t_end: usize,
    /// Number of output qubits.
    pub i_max: usize,
}

/// Prepares the cluster state of `graph`, runs `pattern` set by set, and
/// records `E`, `I`, and (when `track_capacity` is on) `C` and `P` after
/// each equal-time set.
pub fn trace_run(
    graph: &Graph,
    pattern: &MeasurementPattern,
    source: &mut dyn OutcomeSource,
    track_capacity: bool,
) -> Result<AnalogyTrace, AnalogyError> {
    let state = prepare_cluster(graph)?;
    let outputs: BTreeSet<usize> = pattern.outputs().iter().copied().collect();
    let i_max = outputs.len();
    let mut exec = PatternExecutor::new(state, pattern.clone())?;
    let n = graph.n_vertices();
    let measured_of = |unmeasured: &BTreeSet<usize>| -> BTreeSet<usize> {
        (0..n).filter(|v| !unmeasured.contains(v)).collect()
    };
    let record_i = |exec: &PatternExecutor, unmeasured: &BTreeSet<usize>| {
        let unread: BTreeSet<usize> = unmeasured.intersection(&outputs).copied().collect();
        information_bits(exec.state(), &unread, exec.readouts_executed())
    };

    let mut unmeasured = exec.unmeasured_qubits();
    let mut measured = measured_of(&unmeasured);
    let mut prev_e = remaining_entanglement(graph, &measured);
    let mut records = vec![TraceRecord {
        t: 0,
        e: prev_e,
        c: None,
        i: record_i(&exec, &unmeasured)?,
        p: None,
    }];

    let mut t = 0usize;
    loop {
        let pre_set_measured = measured.clone();
        if !exec.run_next_set(source)? {
            break;
        }
        t += 1;
        unmeasured = exec.unmeasured_qubits();
        measured = measured_of(&unmeasured);
        let e = remaining_entanglement(graph, &measured);
        let c = if track_capacity {
            Some(capacity_bruteforce(&CapacityQuery {
                graph,
                measured: &pre_set_measured,
                delta_e: prev_e - e,
            })?)
        } else {
            None
        };
        let p = match c {
            Some(c) => Some(computational_potential(e as f64, c, t as u64)?),
            None => None,
        };
        records.push(TraceRecord {
            t,
            e,
            c,
            i: record_i(&exec, &unmeasured)?,
            p,
        });
        prev_e = e;
    }

    let t_crit = records.iter().find(|r| r.i > 0).map(|r| r.t);
    Ok(AnalogyTrace {
        records,
        t_crit,
        t_end: t,
        i_max,
    })
}
