//! Discrepancy profiles and cycle-level invariants.
//!
//! The coefficients a_j are the unique exact solution of the numerical
//! pull-back condition on the exceptional lattice: for every curve C_i,
//!
//!   sum_j a_j (C_j . C_i)  =  C_i^2 + 2 - (D' . C_i),
//!
//! using adjunction K.C_i = -C_i^2 - 2 on rational curves. The index is the
//! least common multiple of the reduced denominators.

use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use crate::linalg;
use crate::{Int, Rational};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Solved pull-back coefficients for a graph, in vertex order, together
/// with the index (lcm of coefficient denominators).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiscrepancyProfile {
    ids: Vec<VertexId>,
    coefficients: Vec<Rational>,
    index: Int,
}

impl DiscrepancyProfile {
    /// Assemble a profile from coefficients computed elsewhere. The index is
    /// the lcm of the reduced denominators; whether the coefficients actually
    /// solve a given graph's system is checked by the consumers that care
    /// (alignment and congruence tests downstream).
    pub fn from_coefficients(ids: Vec<VertexId>, coefficients: Vec<Rational>) -> Self {
        let index = coefficients.iter().fold(Int::one(), |acc, c| acc.lcm(c.denom()));
        DiscrepancyProfile { ids, coefficients, index }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.coefficients[i]
    }

    pub fn coefficient(&self, id: &VertexId) -> Option<&Rational> {
        self.ids.iter().position(|x| x == id).map(|i| &self.coefficients[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &Rational)> {
        self.ids.iter().zip(self.coefficients.iter())
    }

    /// Positive integer clearing every coefficient denominator, and no
    /// smaller one does. For graphs that are not log terminal this is the
    /// numerical index of the solved system, not an order of a divisor
    /// class; callers presenting it should say so.
    pub fn index(&self) -> &Int {
        &self.index
    }

    pub fn max_coefficient(&self) -> Option<&Rational> {
        self.coefficients.iter().max()
    }

    pub fn matches_graph(&self, g: &ResolutionGraph) -> bool {
        self.ids.len() == g.vertex_count() && self.ids.iter().enumerate().all(|(i, id)| g.id(i) == id)
    }
}

/// Solve the pull-back system for `g`. Refuses graphs whose intersection
/// matrix is not negative definite.
pub fn discrepancies(g: &ResolutionGraph) -> Result<DiscrepancyProfile> {
    let m = g.intersection_matrix();
    if !linalg::is_negative_definite(&m).expect("intersection matrix is symmetric by construction") {
        return Err(Error::NotNegativeDefinite);
    }
    let n = g.vertex_count();
    let rhs_wide: Vec<i128> =
        (0..n).map(|i| g.self_int(i) as i128 + 2 - g.boundary(i) as i128).collect();
    let coefficients = if n > 0 && rhs_wide.iter().all(|v| i64::try_from(*v).is_ok()) {
        let rhs: Vec<i64> = rhs_wide.iter().map(|&v| v as i64).collect();
        let (y, d) = linalg::solve_scaled(&m, &rhs)?;
        y.into_iter().map(|yi| Rational::new(yi, d.clone())).collect()
    } else {
        let rhs: Vec<Rational> =
            rhs_wide.into_iter().map(|v| Rational::from(Int::from(v))).collect();
        linalg::solve_linear_system(&m, &rhs)?
    };
    Ok(DiscrepancyProfile::from_coefficients(g.ids().cloned().collect(), coefficients))
}

/// Where the pair sits relative to the canonical and log terminal bounds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairClass {
    /// Every coefficient is at most 0.
    Canonical,
    /// Some coefficient is positive but all stay below 1.
    LogTerminalNotCanonical,
    /// Some coefficient reaches 1.
    NotLogTerminal,
}

impl PairClass {
    pub fn is_log_terminal(self) -> bool {
        !matches!(self, PairClass::NotLogTerminal)
    }
}

pub fn classify_pair(profile: &DiscrepancyProfile) -> PairClass {
    // denominators are positive, so a >= 1 is numer >= denom; one pass,
    // no rational temporaries
    let mut positive = false;
    for a in profile.coefficients() {
        if a.numer() >= a.denom() {
            return PairClass::NotLogTerminal;
        }
        positive |= a.is_positive();
    }
    if positive {
        PairClass::LogTerminalNotCanonical
    } else {
        PairClass::Canonical
    }
}

/// An effective cycle supported on the exceptional curves, in vertex order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cycle {
    ids: Vec<VertexId>,
    multiplicities: Vec<u64>,
}

impl Cycle {
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn multiplicity(&self, id: &VertexId) -> Option<u64> {
        self.ids.iter().position(|x| x == id).map(|i| self.multiplicities[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, u64)> {
        self.ids.iter().zip(self.multiplicities.iter().copied())
    }

    fn matches_graph(&self, g: &ResolutionGraph) -> bool {
        self.ids.len() == g.vertex_count() && self.ids.iter().enumerate().all(|(i, id)| g.id(i) == id)
    }
}

/// Compute the fundamental cycle by Laufer's procedure: start from the sum
/// of all curves and repeatedly add the lowest-index curve with positive
/// pairing until Z . C_i <= 0 everywhere. Boundary incidences play no role
/// here; the cycle lives on the exceptional locus alone.
///
/// Refuses graphs whose intersection matrix is not negative definite (the
/// procedure need not terminate otherwise).
pub fn fundamental_cycle(g: &ResolutionGraph) -> Result<Cycle> {
    let m = g.intersection_matrix();
    if !linalg::is_negative_definite(&m).expect("intersection matrix is symmetric by construction") {
        return Err(Error::NotNegativeDefinite);
    }
    let n = g.vertex_count();
    let mut z = vec![1u64; n];
    // pairing[i] = (Z . C_i), maintained incrementally
    let mut pairing: Vec<i128> = (0..n).map(|i| g.self_int(i) as i128 + g.degree(i) as i128).collect();
    loop {
        let Some(i) = (0..n).find(|&i| pairing[i] > 0) else {
            break;
        };
        z[i] += 1;
        pairing[i] += g.self_int(i) as i128;
        for &j in g.neighbors(i) {
            pairing[j] += 1;
        }
    }
    Ok(Cycle { ids: g.ids().cloned().collect(), multiplicities: z })
}

/// Self-intersection, canonical pairing, and arithmetic genus of a cycle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycleNumbers {
    pub z_squared: Int,
    pub z_dot_k: Int,
    pub p_a: Rational,
}

/// Exact cycle numbers: Z^2 = z^T M z, Z.K = sum_j z_j (-C_j^2 - 2), and
/// p_a = 1 + (Z^2 + Z.K)/2.
pub fn cycle_numbers(g: &ResolutionGraph, z: &Cycle) -> Result<CycleNumbers> {
    if !z.matches_graph(g) {
        return Err(Error::CycleMismatch);
    }
    let n = g.vertex_count();
    let zs = &z.multiplicities;
    // z^T M z = sum_i w_i z_i^2 + 2 sum_{ij in E} z_i z_j over the adjacency
    let wide = (|| {
        let mut zsq: i128 = 0;
        let mut zk: i128 = 0;
        for i in 0..n {
            let zi = zs[i] as i128;
            let w = g.self_int(i) as i128;
            zsq = zsq.checked_add(w.checked_mul(zi.checked_mul(zi)?)?)?;
            zk = zk.checked_add((-w - 2).checked_mul(zi)?)?;
        }
        for &(i, j) in g.edges() {
            zsq = zsq.checked_add(2_i128.checked_mul((zs[i] as i128).checked_mul(zs[j] as i128)?)?)?;
        }
        Some((zsq, zk))
    })();
    let (z_squared, z_dot_k) = match wide {
        Some((zsq, zk)) => (Int::from(zsq), Int::from(zk)),
        None => {
            let mut zsq = Int::zero();
            let mut zk = Int::zero();
            for i in 0..n {
                let zi = Int::from(zs[i]);
                let w = Int::from(g.self_int(i));
                zsq += &w * &zi * &zi;
                zk += (-w - 2) * &zi;
            }
            for &(i, j) in g.edges() {
                zsq += Int::from(2) * Int::from(zs[i]) * Int::from(zs[j]);
            }
            (zsq, zk)
        }
    };
    let p_a = Rational::one() + Rational::new(&z_squared + &z_dot_k, Int::from(2));
    Ok(CycleNumbers { z_squared, z_dot_k, p_a })
}

/// Outcome of the fundamental-cycle rationality test.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalityReport {
    /// Whether Z^2 + Z.K < 0 holds for the fundamental cycle.
    pub inequality_holds: bool,
    pub p_a: Rational,
    /// The multiplicity -Z^2, reported when p_a(Z) = 0.
    pub multiplicity: Option<Int>,
}

/// Check Z^2 + Z.K < 0 for the fundamental cycle of a log terminal graph.
///
/// Boundary incidences are dropped first (a log terminal pair stays log
/// terminal without its boundary, and the statement concerns the surface
/// alone). Refuses graphs that are not negative definite or not log
/// terminal as bare surfaces.
pub fn rationality_check(g: &ResolutionGraph) -> Result<RationalityReport> {
    let bare = g.without_boundary();
    let profile = discrepancies(&bare)?;
    if !classify_pair(&profile).is_log_terminal() {
        return Err(Error::NotLogTerminalInput);
    }
    let z = fundamental_cycle(&bare)?;
    let numbers = cycle_numbers(&bare, &z)?;
    let sum = &numbers.z_squared + &numbers.z_dot_k;
    let multiplicity = numbers.p_a.is_zero().then(|| -&numbers.z_squared);
    Ok(RationalityReport { inequality_holds: sum < Int::zero(), p_a: numbers.p_a, multiplicity })
}
