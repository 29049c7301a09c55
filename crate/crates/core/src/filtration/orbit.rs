use serde::{Deserialize, Serialize};

use super::{FiltrationError, GridActionComplex};
use crate::persistence::{FilteredComplex, Generator};
use crate::twist::OrbitRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointKind {
    Birth,
    Death,
    Essential,
}

/// A bar endpoint of the grid barcode with the index of its critical cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub value: f64,
    pub degree: usize,
    pub kind: EndpointKind,
    /// Length of the bar it belongs to, ∞ for essential ones.
    pub bar_length: f64,
    /// Index of the grid persistence pair.
    pub pair: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub tolerance: f64,
    pub endpoints: Vec<Endpoint>,
    /// (endpoint index, orbit index)
    pub matched: Vec<(usize, usize)>,
    pub unmatched_endpoints: Vec<usize>,
    /// Orbits that no endpoint was matched to.
    pub unmatched_orbits: Vec<usize>,
    /// Unmatched endpoints of bars longer than twice the tolerance.
    pub significant_unmatched: usize,
}

impl MatchReport {
    pub fn is_perfect(&self) -> bool {
        self.unmatched_endpoints.is_empty() && self.unmatched_orbits.is_empty()
    }
}

fn endpoints(grid: &GridActionComplex) -> Vec<Endpoint> {
    let mut out = Vec::new();
    for (p, &(birth, death, degree)) in grid.pairs().iter().enumerate() {
        match death {
            Some(d) => {
                let bar_length = d - birth;
                out.push(Endpoint {
                    value: birth,
                    degree,
                    kind: EndpointKind::Birth,
                    bar_length,
                    pair: p,
                });
                out.push(Endpoint {
                    value: d,
                    degree: degree + 1,
                    kind: EndpointKind::Death,
                    bar_length,
                    pair: p,
                });
            }
            None => out.push(Endpoint {
                value: birth,
                degree,
                kind: EndpointKind::Essential,
                bar_length: f64::INFINITY,
                pair: p,
            }),
        }
    }
    out
}

/// Greedy matching of grid bar endpoints to orbit actions.
///
/// An endpoint matches an orbit of equal Morse index within twice the grid
/// modulus; endpoints of longer bars are served first. An orbit of minimal
/// period q accounts for q critical points of W_k, so it can absorb up to q
/// endpoints.
pub fn cross_validate(grid: &GridActionComplex, orbits: &[OrbitRecord]) -> MatchReport {
    let tolerance = 2.0 * grid.modulus;
    let endpoints = endpoints(grid);
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (e, ep) in endpoints.iter().enumerate() {
        for (o, orb) in orbits.iter().enumerate() {
            let d = (ep.value - orb.action).abs();
            if orb.morse_index == ep.degree && d <= tolerance {
                candidates.push((d, e, o));
            }
        }
    }
    // long bars claim their orbits first, so grid noise cannot take them
    candidates.sort_by(|a, b| {
        endpoints[b.1]
            .bar_length
            .total_cmp(&endpoints[a.1].bar_length)
            .then(a.0.total_cmp(&b.0))
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut used = vec![false; endpoints.len()];
    let mut capacity: Vec<usize> = orbits.iter().map(|o| o.minimal_period.max(1)).collect();
    let mut hit = vec![false; orbits.len()];
    let mut matched = Vec::new();
    for (_, e, o) in candidates {
        if !used[e] && capacity[o] > 0 {
            used[e] = true;
            capacity[o] -= 1;
            hit[o] = true;
            matched.push((e, o));
        }
    }
    matched.sort_unstable();
    let unmatched_endpoints: Vec<usize> = (0..endpoints.len()).filter(|&e| !used[e]).collect();
    let significant_unmatched = unmatched_endpoints
        .iter()
        .filter(|&&e| endpoints[e].bar_length > 2.0 * tolerance)
        .count();
    MatchReport {
        tolerance,
        unmatched_orbits: (0..orbits.len()).filter(|&o| !hit[o]).collect(),
        endpoints,
        matched,
        unmatched_endpoints,
        significant_unmatched,
    }
}

#[derive(Debug, Clone)]
pub struct OrbitComplex {
    pub complex: FilteredComplex,
    /// Set when no grid was supplied and the differential is zero.
    pub spectrum_only: bool,
    /// Orbit index of each generator.
    pub generator_orbit: Vec<usize>,
    /// Grid pairs whose endpoints matched orbits in the wrong order.
    pub unimported_pairs: usize,
}

/// Complex on the periodic points of the orbits, filtered by action.
///
/// An orbit of minimal period q contributes q generators. The differential
/// pairs generators along the grid persistence pairs when a grid is given and
/// is zero otherwise.
pub fn orbit_complex(
    orbits: &[OrbitRecord],
    grid: Option<&GridActionComplex>,
) -> Result<OrbitComplex, FiltrationError> {
    if let Some(o) = orbits.iter().find(|o| !o.nondegenerate) {
        return Err(FiltrationError::DegenerateInput(format!(
            "k = {}, m = {}, action {}",
            o.k, o.m, o.action
        )));
    }
    if let Some(first) = orbits.first() {
        let (k, m) = (first.k, first.m);
        let grid_mismatch = grid.is_some_and(|g| g.k != k || g.m != m);
        if grid_mismatch || orbits.iter().any(|o| o.k != k || o.m != m) {
            return Err(FiltrationError::MixedOrbits);
        }
    } else {
        return Ok(OrbitComplex {
            complex: FilteredComplex::empty(),
            spectrum_only: grid.is_none(),
            generator_orbit: Vec::new(),
            unimported_pairs: 0,
        });
    }

    // generator copies per orbit, in orbit order
    let mut copies: Vec<(usize, usize)> = Vec::new();
    for (o, orb) in orbits.iter().enumerate() {
        for j in 0..orb.minimal_period.max(1) {
            copies.push((o, j));
        }
    }
    let mut order: Vec<usize> = (0..copies.len()).collect();
    order.sort_by(|&a, &b| {
        let (oa, ob) = (&orbits[copies[a].0], &orbits[copies[b].0]);
        oa.action
            .total_cmp(&ob.action)
            .then(oa.morse_index.cmp(&ob.morse_index))
            .then(copies[a].cmp(&copies[b]))
    });
    let mut position = vec![0usize; copies.len()];
    for (p, &c) in order.iter().enumerate() {
        position[c] = p;
    }
    let mut columns: Vec<Vec<u32>> = vec![Vec::new(); copies.len()];
    let mut unimported = 0;

    if let Some(g) = grid {
        let report = cross_validate(g, orbits);
        let first_copy: Vec<usize> = {
            let mut f = Vec::with_capacity(orbits.len());
            let mut acc = 0;
            for orb in orbits {
                f.push(acc);
                acc += orb.minimal_period.max(1);
            }
            f
        };
        let mut next = vec![0usize; orbits.len()];
        let mut copy_of_endpoint = vec![None; report.endpoints.len()];
        for &(e, o) in &report.matched {
            copy_of_endpoint[e] = Some(first_copy[o] + next[o]);
            next[o] += 1;
        }
        // births and deaths of the same grid pair
        let mut by_pair: std::collections::HashMap<usize, (Option<usize>, Option<usize>)> =
            std::collections::HashMap::new();
        for (e, ep) in report.endpoints.iter().enumerate() {
            let slot = by_pair.entry(ep.pair).or_default();
            match ep.kind {
                EndpointKind::Birth => slot.0 = copy_of_endpoint[e],
                EndpointKind::Death => slot.1 = copy_of_endpoint[e],
                EndpointKind::Essential => {}
            }
        }
        let mut pairs: Vec<_> = by_pair.into_iter().collect();
        pairs.sort_unstable_by_key(|p| p.0);
        for (_, (b, d)) in pairs {
            if let (Some(b), Some(d)) = (b, d) {
                if position[b] < position[d] && orbits[copies[b].0].action < orbits[copies[d].0].action {
                    columns[position[d]] = vec![position[b] as u32];
                } else {
                    unimported += 1;
                }
            }
        }
    }

    let generators: Vec<Generator> = order
        .iter()
        .map(|&c| {
            let (o, j) = copies[c];
            let orb = &orbits[o];
            Generator::new(format!("o{o}.{j}"), orb.action).with_degree(orb.morse_index as i32)
        })
        .collect();
    Ok(OrbitComplex {
        complex: FilteredComplex::from_ordered(generators, columns)?,
        spectrum_only: grid.is_none(),
        generator_orbit: order.iter().map(|&c| copies[c].0).collect(),
        unimported_pairs: unimported,
    })
}
