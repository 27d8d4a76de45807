//! Combinatorial blow-up of a point on a resolved surface, with exact
//! transport of discrepancy coefficients.
//!
//! Blowing up a smooth point inserts one new (-1)-curve E and adjusts the
//! strict transforms: every curve through the point loses 1 from its
//! self-intersection and meets E instead. The coefficient of E follows
//! from the multiplicity of the pulled-back pair at the point, so the
//! transported profile solves the new graph's system without re-solving
//! it. `verify_transport` checks exactly that, the long way.

use crate::discrepancy::{discrepancies, DiscrepancyProfile};
use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use crate::Rational;
use num_traits::{One, Zero};
use std::fmt;
use std::str::FromStr;

/// Where the blown-up point sits relative to the configuration.
///
/// Text form: `free:C1`, `edge:C1,C2`, `boundary:C1`, or `boundary:-` for
/// a boundary point away from every exceptional curve.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BlowUpCenter {
    /// A point on one curve, away from all others and from the boundary.
    FreePoint(VertexId),
    /// The intersection point of two adjacent curves.
    EdgePoint(VertexId, VertexId),
    /// A point where the boundary meets the given curve, or an isolated
    /// boundary point (`None`).
    BoundaryPoint(Option<VertexId>),
}

impl fmt::Display for BlowUpCenter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlowUpCenter::FreePoint(v) => write!(f, "free:{v}"),
            BlowUpCenter::EdgePoint(u, v) => write!(f, "edge:{u},{v}"),
            BlowUpCenter::BoundaryPoint(Some(v)) => write!(f, "boundary:{v}"),
            BlowUpCenter::BoundaryPoint(None) => write!(f, "boundary:-"),
        }
    }
}

impl FromStr for BlowUpCenter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidId {
            id: s.to_string(),
            reason: "expected free:<id>, edge:<id>,<id>, or boundary:<id or ->",
        };
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "free" => Ok(BlowUpCenter::FreePoint(rest.parse()?)),
            "edge" => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Ok(BlowUpCenter::EdgePoint(a.parse()?, b.parse()?))
            }
            "boundary" if rest == "-" => Ok(BlowUpCenter::BoundaryPoint(None)),
            "boundary" => Ok(BlowUpCenter::BoundaryPoint(Some(rest.parse()?))),
            _ => Err(bad()),
        }
    }
}

/// First id of the form `E<n>` not already used by the graph.
fn fresh_id(g: &ResolutionGraph) -> VertexId {
    for n in 1.. {
        let candidate = format!("E{n}");
        if g.ids().all(|id| id.as_str() != candidate) {
            return VertexId::new(candidate).expect("generated ids are valid");
        }
    }
    unreachable!()
}

/// Blow up `center` and transport the discrepancy profile.
///
/// The new vertex is appended after the existing ones. Refusals:
/// `ProfileMismatch` when the profile's ids differ from the graph's,
/// `UnknownVertex`/`MissingEdge`/`NoBoundaryAt` when the center does not
/// exist, `WeightUnderflow` when a self-intersection cannot drop further.
pub fn blow_up(
    g: &ResolutionGraph,
    profile: &DiscrepancyProfile,
    center: &BlowUpCenter,
) -> Result<(ResolutionGraph, DiscrepancyProfile)> {
    if !profile.matches_graph(g) {
        return Err(Error::ProfileMismatch);
    }
    let resolve = |id: &VertexId| g.index_of(id).ok_or_else(|| Error::UnknownVertex(id.clone()));

    let mut weights: Vec<i64> = (0..g.vertex_count()).map(|i| g.self_int(i)).collect();
    let mut boundary: Vec<u64> = (0..g.vertex_count()).map(|i| g.boundary(i)).collect();
    let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
    let e = g.vertex_count();
    let mut e_boundary = 0u64;

    let drop_weight = |weights: &mut Vec<i64>, i: usize| -> Result<()> {
        weights[i] = weights[i]
            .checked_sub(1)
            .ok_or_else(|| Error::WeightUnderflow(g.id(i).clone()))?;
        Ok(())
    };

    let a_e: Rational = match center {
        BlowUpCenter::FreePoint(v) => {
            let i = resolve(v)?;
            drop_weight(&mut weights, i)?;
            edges.push((i, e));
            profile.get(i) - Rational::one()
        }
        BlowUpCenter::EdgePoint(u, v) => {
            let (i, j) = (resolve(u)?, resolve(v)?);
            let pair = (i.min(j), i.max(j));
            let Some(pos) = edges.iter().position(|&p| p == pair) else {
                return Err(Error::MissingEdge(u.clone(), v.clone()));
            };
            edges.remove(pos);
            drop_weight(&mut weights, i)?;
            drop_weight(&mut weights, j)?;
            edges.push((i, e));
            edges.push((j, e));
            profile.get(i) + profile.get(j) - Rational::one()
        }
        BlowUpCenter::BoundaryPoint(Some(v)) => {
            let i = resolve(v)?;
            if boundary[i] == 0 {
                return Err(Error::NoBoundaryAt(v.clone()));
            }
            boundary[i] -= 1;
            e_boundary = 1;
            drop_weight(&mut weights, i)?;
            edges.push((i, e));
            profile.get(i).clone()
        }
        BlowUpCenter::BoundaryPoint(None) => {
            e_boundary = 1;
            Rational::zero()
        }
    };

    let mut ids: Vec<VertexId> = g.ids().cloned().collect();
    ids.push(fresh_id(g));
    let vertices: Vec<(VertexId, i64)> = ids.iter().cloned().zip(weights.into_iter().chain([-1])).collect();
    let edge_ids: Vec<(VertexId, VertexId)> =
        edges.iter().map(|&(i, j)| (ids[i].clone(), ids[j].clone())).collect();
    let mut boundary_ids: Vec<(VertexId, u64)> = boundary
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(i, &m)| (ids[i].clone(), m))
        .collect();
    if e_boundary > 0 {
        boundary_ids.push((ids[e].clone(), e_boundary));
    }
    let new_graph = ResolutionGraph::new(vertices, edge_ids, boundary_ids)?;

    let mut coefficients: Vec<Rational> = profile.coefficients().to_vec();
    coefficients.push(a_e);
    let new_profile = DiscrepancyProfile::from_coefficients(ids, coefficients);
    Ok((new_graph, new_profile))
}

/// Solve the blown-up graph from scratch and compare with the transported
/// profile. Exact equality is the correctness statement for `blow_up`.
pub fn verify_transport(g: &ResolutionGraph, center: &BlowUpCenter) -> Result<bool> {
    let profile = discrepancies(g)?;
    let (blown, transported) = blow_up(g, &profile, center)?;
    let direct = discrepancies(&blown)?;
    Ok(direct == transported)
}
