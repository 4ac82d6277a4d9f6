//! End-to-end routing of a circuit onto an architecture, with verification.

use thiserror::Error;

use crate::arch::Architecture;
use crate::circuit::{from_circuit, is_mapped, trace_to_circuit, Circuit, CircuitError};
use crate::exec::Execution;
use crate::gf2::default_pmh_block_size;
use crate::phasepoly::{extract_phase_poly, synthesize_phase_poly_with, PhaseError, PhasePolynomial};
use crate::placement::{
    apply_placement, optimize_permutation, optimize_placement, GaParams, Placement, PlacementError,
};
use crate::router::{synthesize, Method, RouterError};

#[derive(Debug, Error)]
pub enum RouteError {
    #[error("circuit has {circuit} qubits but the architecture only {arch}")]
    TooWide { circuit: usize, arch: usize },
    #[error("input is not a CNOT circuit: {0}")]
    Input(CircuitError),
    #[error("input is not a CNOT+Rz circuit: {0}")]
    PhaseInput(PhaseError),
    #[error(transparent)]
    Router(#[from] RouterError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Phase(PhaseError),
    #[error("verification failed: {0}")]
    Verification(&'static str),
}

impl RouteError {
    /// True when the input itself was rejected, as opposed to a failure while routing it.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            RouteError::TooWide { .. } | RouteError::Input(_) | RouteError::PhaseInput(_)
        )
    }
}

impl From<PhaseError> for RouteError {
    fn from(e: PhaseError) -> Self {
        match e {
            PhaseError::Router(r) => RouteError::Router(r),
            other => RouteError::Phase(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteOptions {
    /// GA placement search; `None` keeps the identity placement.
    pub placement: Option<GaParams>,
    /// Ignore connectivity and use Patel-Markov-Hayes.
    pub unconstrained: bool,
    /// Treat the input as CNOT+Rz and re-synthesize its phase polynomial.
    pub phasepoly: bool,
    pub exec: Execution,
}

impl RouteOptions {
    pub fn new(placement: Option<GaParams>) -> Self {
        Self {
            placement,
            unconstrained: false,
            phasepoly: false,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Routed {
    /// Output on physical qubits; logical qubit `i` lives on `placement.physical(i)`.
    pub circuit: Circuit,
    pub placement: Placement,
    pub input_cnots: usize,
    pub output_cnots: usize,
}

impl Routed {
    pub fn overhead_percent(&self) -> f64 {
        overhead_percent(self.input_cnots as f64, self.output_cnots as f64)
    }
}

/// `100·(output − input)/input`, reported as 0 for an empty input.
pub fn overhead_percent(input: f64, output: f64) -> f64 {
    if input == 0.0 {
        0.0
    } else {
        100.0 * (output - input) / input
    }
}

/// Routes `c` onto `a` and checks the result before returning it.
///
/// A circuit narrower than the architecture is widened with idle qubits.
/// The output always computes the input's parity map (and phase polynomial)
/// under the returned placement; unless `unconstrained`, every CNOT is on an edge.
pub fn route_circuit(c: &Circuit, a: &Architecture, opts: &RouteOptions) -> Result<Routed, RouteError> {
    let n = a.n();
    if c.n() > n {
        return Err(RouteError::TooWide {
            circuit: c.n(),
            arch: n,
        });
    }
    let c = Circuit::from_gates(n, c.gates().to_vec()).map_err(RouteError::Input)?;
    let input_cnots = c.count_cnots();
    let (circuit, placement) = if opts.phasepoly {
        route_phase_poly(&c, a, opts)?
    } else {
        route_linear(&c, a, opts)?
    };
    if !opts.unconstrained && !is_mapped(&circuit, a) {
        return Err(RouteError::Verification("a CNOT is off the architecture"));
    }
    let output_cnots = circuit.count_cnots();
    Ok(Routed {
        circuit,
        placement,
        input_cnots,
        output_cnots,
    })
}

fn route_linear(c: &Circuit, a: &Architecture, opts: &RouteOptions) -> Result<(Circuit, Placement), RouteError> {
    let n = a.n();
    let p = from_circuit(c).map_err(RouteError::Input)?;
    let method = if opts.unconstrained {
        Method::Pmh(default_pmh_block_size(n))
    } else {
        Method::Auto
    };
    let (trace, placement) = match &opts.placement {
        None => (synthesize(&p, a, method)?, Placement::identity(n)),
        Some(params) => {
            let r = optimize_placement(&p, params, &|m| synthesize(m, a, method), opts.exec)?;
            (r.trace, r.placement)
        }
    };
    let out = trace_to_circuit(&trace, n);
    let produced = from_circuit(&out).map_err(RouteError::Input)?;
    if produced != apply_placement(&p, &placement)? {
        return Err(RouteError::Verification("parity map differs from the input"));
    }
    Ok((out, placement))
}

fn route_phase_poly(c: &Circuit, a: &Architecture, opts: &RouteOptions) -> Result<(Circuit, Placement), RouteError> {
    let n = a.n();
    let pp = extract_phase_poly(c).map_err(RouteError::PhaseInput)?;
    let (target, method) = if opts.unconstrained {
        (Architecture::complete(n), Method::Pmh(default_pmh_block_size(n)))
    } else {
        (a.clone(), Method::Auto)
    };
    let synth = |pl: &Placement| -> Result<Circuit, RouteError> {
        Ok(synthesize_phase_poly_with(&pp.relabel(pl.as_slice()), &target, method)?)
    };
    let placement = match &opts.placement {
        Some(params) => {
            let cost = |pl: &Placement| -> Result<usize, RouteError> { Ok(synth(pl)?.count_cnots()) };
            optimize_permutation(n, params, &cost, opts.exec)?.placement
        }
        None => Placement::identity(n),
    };
    let out = synth(&placement)?;
    if !phase_poly_matches(&out, &pp.relabel(placement.as_slice())) {
        return Err(RouteError::Verification("phase polynomial differs from the input"));
    }
    Ok((out, placement))
}

fn phase_poly_matches(out: &Circuit, expected: &PhasePolynomial) -> bool {
    extract_phase_poly(out).is_ok_and(|got| got.approx_eq(expected, crate::circuit::PHASE_TOLERANCE))
}
