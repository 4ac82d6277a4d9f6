//! Phase polynomials of CNOT+Rz circuits and their constrained re-synthesis.
//!
//! A CNOT+Rz circuit maps `|x⟩` to `e^{iφ(x)} |Lx⟩` where `L` is a parity
//! matrix and `φ(x) = Σ α·(v·x)` over angle-tagged parity vectors `v`.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::arch::{Architecture, VertexSet};
use crate::circuit::{trace_to_circuit, Circuit, CircuitError, Gate};
use crate::gf2::{BitVec, MatrixError, ParityMatrix};
use crate::router::{fill_and_empty, synthesize, Method, RouterError, TreeColumn};

/// Angles closer than this to a multiple of 2π count as zero.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PhaseError {
    #[error("gate {gate} at position {index} is not a CNOT or Rz")]
    UnsupportedGate { gate: &'static str, index: usize },
    #[error("parity vector of length {found} in a {expected}-qubit polynomial")]
    WidthMismatch { expected: usize, found: usize },
    #[error("parity vectors must be nonzero")]
    ZeroParity,
    #[error("linear part is not invertible")]
    Singular,
    #[error(transparent)]
    Router(#[from] RouterError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

impl From<MatrixError> for PhaseError {
    fn from(_: MatrixError) -> Self {
        PhaseError::Singular
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTerm {
    pub angle: f64,
    pub parity: BitVec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePolynomial {
    linear: ParityMatrix,
    terms: Vec<PhaseTerm>,
}

fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r < ANGLE_TOLERANCE || TAU - r < ANGLE_TOLERANCE {
        0.0
    } else {
        r
    }
}

impl PhasePolynomial {
    /// Builds a normalized polynomial: terms with equal parity are merged in
    /// first-occurrence order, angles reduced into `[0, 2π)`, zero angles dropped.
    pub fn new(linear: ParityMatrix, terms: Vec<PhaseTerm>) -> Result<Self, PhaseError> {
        let n = linear.n();
        if !linear.is_invertible() {
            return Err(PhaseError::Singular);
        }
        let mut merged: Vec<PhaseTerm> = Vec::new();
        for t in terms {
            if t.parity.len() != n {
                return Err(PhaseError::WidthMismatch {
                    expected: n,
                    found: t.parity.len(),
                });
            }
            if t.parity.is_zero() {
                return Err(PhaseError::ZeroParity);
            }
            match merged.iter_mut().find(|m| m.parity == t.parity) {
                Some(m) => m.angle += t.angle,
                None => merged.push(t),
            }
        }
        for m in &mut merged {
            m.angle = reduce_angle(m.angle);
        }
        merged.retain(|m| m.angle != 0.0);
        Ok(Self { linear, terms: merged })
    }

    pub fn n(&self) -> usize {
        self.linear.n()
    }

    pub fn linear(&self) -> &ParityMatrix {
        &self.linear
    }

    pub fn terms(&self) -> &[PhaseTerm] {
        &self.terms
    }

    /// `φ(x)` reduced into `[0, 2π)`.
    pub fn phase(&self, x: &BitVec) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.parity.dot(x))
            .map(|t| t.angle)
            .sum::<f64>()
            .rem_euclid(TAU)
    }

    /// Same linear part and the same parity-to-angle map within `tol`, ignoring term order.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.linear == other.linear
            && self.terms.len() == other.terms.len()
            && self.terms.iter().all(|t| {
                other
                    .terms
                    .iter()
                    .any(|u| u.parity == t.parity && crate::circuit::phase_distance(u.angle, t.angle) <= tol)
            })
    }

    /// The polynomial with qubit `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.n();
        let move_vec = |v: &BitVec| {
            let mut out = BitVec::zeros(n);
            for i in v.ones() {
                out.set(perm[i], true);
            }
            out
        };
        let mut linear = ParityMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                linear.set(perm[i], perm[j], self.linear.get(i, j));
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|t| PhaseTerm {
                angle: t.angle,
                parity: move_vec(&t.parity),
            })
            .collect();
        Self { linear, terms }
    }
}

/// Tracks each wire's parity label through the circuit; every Rz contributes
/// its angle on the label of its wire.
pub fn extract_phase_poly(c: &Circuit) -> Result<PhasePolynomial, PhaseError> {
    let n = c.n();
    let mut labels: Vec<BitVec> = (0..n).map(|q| BitVec::unit(n, q)).collect();
    let mut terms = Vec::new();
    for (index, g) in c.gates().iter().enumerate() {
        match *g {
            Gate::Cnot { control, target } => {
                let src = labels[control].clone();
                labels[target].xor_assign(&src);
            }
            Gate::Rz { angle, qubit } => terms.push(PhaseTerm {
                angle,
                parity: labels[qubit].clone(),
            }),
            Gate::H { .. } => return Err(PhaseError::UnsupportedGate { gate: "h", index }),
        }
    }
    PhasePolynomial::new(ParityMatrix::from_rows(labels)?, terms)
}

/// Coordinates of a parity in the basis of wire labels. Adding entry `s`
/// into entry `t` here is the wire operation CNOT(t → s).
struct Coordinates<'a> {
    coeffs: BitVec,
    wires: &'a mut ParityMatrix,
    circuit: &'a mut Circuit,
}

impl TreeColumn for Coordinates<'_> {
    fn bit(&self, v: usize) -> bool {
        self.coeffs.get(v)
    }

    fn add(&mut self, src: usize, tgt: usize) {
        if self.coeffs.get(src) {
            self.coeffs.flip(tgt);
        }
        self.wires.add_row_unchecked(tgt, src);
        self.circuit
            .push(Gate::Cnot {
                control: tgt,
                target: src,
            })
            .expect("tree edges are valid qubit pairs");
    }
}

/// Synthesizes `pp` with every CNOT on an edge of `a`.
///
/// Wire labels start as the identity. Terms are handled greedily, always
/// next taking the one closest in Hamming distance to some current label.
/// Its coordinates in the label basis are reduced to a single wire along a
/// Steiner tree, the Rz goes on that wire, and the remaining linear map
/// `L·W⁻¹` is routed at the end.
pub fn synthesize_phase_poly(pp: &PhasePolynomial, a: &Architecture) -> Result<Circuit, PhaseError> {
    synthesize_phase_poly_with(pp, a, Method::Auto)
}

pub fn synthesize_phase_poly_with(
    pp: &PhasePolynomial,
    a: &Architecture,
    method: Method,
) -> Result<Circuit, PhaseError> {
    let n = pp.n();
    if n != a.n() {
        return Err(RouterError::DimensionMismatch { matrix: n, arch: a.n() }.into());
    }
    let mut wires = ParityMatrix::identity(n);
    let mut circuit = Circuit::new(n);
    let mut pending: Vec<&PhaseTerm> = pp.terms.iter().collect();
    let all = VertexSet::full(n);

    while !pending.is_empty() {
        let (pos, _) = pending
            .iter()
            .enumerate()
            .map(|(i, t)| {
                (
                    i,
                    wires
                        .rows()
                        .iter()
                        .map(|r| r.hamming_distance(&t.parity))
                        .min()
                        .unwrap(),
                )
            })
            .min_by_key(|&(i, d)| (d, i))
            .unwrap();
        let term = pending.remove(pos);

        let coeffs = wires.inverse()?.vec_mul(&term.parity);
        let support: Vec<usize> = coeffs.ones().collect();
        let root = *support
            .iter()
            .min_by_key(|&&r| (wires.row(r).hamming_distance(&term.parity), r))
            .expect("nonzero parity has nonempty coordinates");
        let tree = a.steiner_tree(&support, root, &all).map_err(RouterError::from)?;
        let mut column = Coordinates {
            coeffs,
            wires: &mut wires,
            circuit: &mut circuit,
        };
        fill_and_empty(&mut column, &tree, |_, _| true)?;
        debug_assert_eq!(wires.row(root), &term.parity);
        circuit.push(Gate::Rz {
            angle: term.angle,
            qubit: root,
        })?;
    }

    let rest = pp.linear.mul(&wires.inverse()?)?;
    let trace = synthesize(&rest, a, method)?;
    circuit.extend(&trace_to_circuit(&trace, n))?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{
        from_circuit, is_mapped, phase_distance, random_cnot_circuit, random_cnot_rz_circuit, simulate,
    };
    use crate::examples::phase_poly_linear_example;
    use crate::router::steiner_gauss;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};

    fn bits(s: &str) -> BitVec {
        BitVec::from_bit_str(s).unwrap()
    }

    fn example_circuit(angles: [f64; 4]) -> Circuit {
        let [alpha, beta, gamma, delta] = angles;
        let mut c = Circuit::new(4);
        c.rz(alpha, 0).unwrap();
        c.cnot(0, 1).unwrap();
        c.rz(beta, 1).unwrap();
        c.cnot(2, 1).unwrap();
        c.rz(gamma, 1).unwrap();
        c.cnot(2, 3).unwrap();
        c.rz(delta, 3).unwrap();
        c
    }

    /// Basis-state oracle: same output state and phase on every input.
    fn equivalent(a: &Circuit, b: &Circuit) -> bool {
        let n = a.n();
        (0..1u32 << n).all(|x| {
            let x = BitVec::from_bools(&(0..n).map(|i| x >> i & 1 == 1).collect::<Vec<_>>());
            let (ya, pa) = simulate(a, &x).unwrap();
            let (yb, pb) = simulate(b, &x).unwrap();
            ya == yb && phase_distance(pa, pb) < 1e-9
        })
    }

    #[test]
    fn extracts_the_worked_example() {
        let angles = [0.1, 0.2, 0.3, 0.4];
        let pp = extract_phase_poly(&example_circuit(angles)).unwrap();
        assert_eq!(pp.linear(), &phase_poly_linear_example());
        let expected: Vec<(f64, BitVec)> = angles
            .iter()
            .copied()
            .zip(["1000", "1100", "1110", "0011"].map(bits))
            .collect();
        assert_eq!(pp.terms().len(), 4);
        for (t, (angle, parity)) in pp.terms().iter().zip(expected) {
            assert_eq!(t.parity, parity);
            assert!((t.angle - angle).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_extractions() {
        let mut c = Circuit::new(3);
        c.rz(0.7, 0).unwrap();
        let pp = extract_phase_poly(&c).unwrap();
        assert!(pp.linear().is_identity());
        assert_eq!(
            pp.terms(),
            &[PhaseTerm {
                angle: 0.7,
                parity: bits("100")
            }]
        );

        let c = random_cnot_circuit(5, 12, 3).unwrap();
        let pp = extract_phase_poly(&c).unwrap();
        assert!(pp.terms().is_empty());
        assert_eq!(pp.linear(), &from_circuit(&c).unwrap());

        let mut h = Circuit::new(2);
        h.h(1).unwrap();
        assert!(matches!(
            extract_phase_poly(&h),
            Err(PhaseError::UnsupportedGate { .. })
        ));
    }

    #[test]
    fn normalization_merges_and_drops() {
        let id = ParityMatrix::identity(2);
        let pp = PhasePolynomial::new(
            id.clone(),
            vec![
                PhaseTerm {
                    angle: 1.0,
                    parity: bits("11"),
                },
                PhaseTerm {
                    angle: 0.5,
                    parity: bits("10"),
                },
                PhaseTerm {
                    angle: TAU - 1.0,
                    parity: bits("11"),
                },
                PhaseTerm {
                    angle: -0.25,
                    parity: bits("10"),
                },
            ],
        )
        .unwrap();
        assert_eq!(
            pp.terms(),
            &[PhaseTerm {
                angle: 0.25,
                parity: bits("10")
            }]
        );
        assert!(matches!(
            PhasePolynomial::new(
                id.clone(),
                vec![PhaseTerm {
                    angle: 1.0,
                    parity: bits("00")
                }]
            ),
            Err(PhaseError::ZeroParity)
        ));
        assert!(matches!(
            PhasePolynomial::new(
                id,
                vec![PhaseTerm {
                    angle: 1.0,
                    parity: bits("100")
                }]
            ),
            Err(PhaseError::WidthMismatch { .. })
        ));
    }

    #[test]
    fn trivial_syntheses() {
        let a = Architecture::builtin("square-9").unwrap();
        let p = crate::gf2::random_invertible(9, 4);
        let pp = PhasePolynomial::new(p.clone(), vec![]).unwrap();
        let c = synthesize_phase_poly(&pp, &a).unwrap();
        assert_eq!(c, trace_to_circuit(&steiner_gauss(&p, &a).unwrap(), 9));

        let mut e4 = BitVec::zeros(9);
        e4.set(4, true);
        let pp = PhasePolynomial::new(ParityMatrix::identity(9), vec![PhaseTerm { angle: 0.3, parity: e4 }]).unwrap();
        let c = synthesize_phase_poly(&pp, &a).unwrap();
        assert_eq!(c.gates(), &[Gate::Rz { angle: 0.3, qubit: 4 }]);
    }

    #[test]
    fn worked_example_on_a_path() {
        let input = example_circuit([0.1, 0.2, 0.3, 0.4]);
        let a = Architecture::line(4);
        let pp = extract_phase_poly(&input).unwrap();
        let out = synthesize_phase_poly(&pp, &a).unwrap();
        assert!(is_mapped(&out, &a));
        assert!(equivalent(&input, &out));
        assert!(extract_phase_poly(&out).unwrap().approx_eq(&pp, 1e-12));
    }

    #[test]
    fn relabel_matches_circuit_relabel() {
        let c = random_cnot_rz_circuit(5, 30, 0.4, 8).unwrap();
        let perm = [3, 0, 4, 1, 2];
        let lhs = extract_phase_poly(&c.relabel(&perm)).unwrap();
        let rhs = extract_phase_poly(&c).unwrap().relabel(&perm);
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn resynthesis_is_equivalent(n in 2usize..=6, count in 0usize..40, seed in any::<u64>(), tree in any::<bool>()) {
            let input = random_cnot_rz_circuit(n, count, 0.4, seed).unwrap();
            let a = if tree { Architecture::binary_tree(n) } else { Architecture::line(n) };
            let pp = extract_phase_poly(&input).unwrap();
            let out = synthesize_phase_poly(&pp, &a).unwrap();
            prop_assert!(is_mapped(&out, &a));
            prop_assert!(equivalent(&input, &out));
            let back = extract_phase_poly(&out).unwrap();
            prop_assert!(back.approx_eq(&pp, 1e-9));
            prop_assert!(pp.terms().len() <= count);
        }
    }
}
