//! Reduction of a fractional ring solution to crossing canonical form.
//!
//! Unsplit commodities are fixed on their path. A parallel pair is made
//! less split by moving flow off the two "outer" paths, which never raises
//! an edge load and leaves one of the pair unsplit. Once every remaining
//! pair crosses, the endpoints alternate as `s_1..s_k', t_1..t_k'` around the
//! cycle, and vertices without endpoints are contracted away.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::RingError;
use crate::model::{Commodity, PathChoice, RingEdge, RingFractionalSolution, RingInstance, RingUnsplittableSolution};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPath {
    pub commodity: usize,
    pub choice: PathChoice,
}

/// Preprocessing state on the original instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialForm {
    /// Current split of every commodity; fixed ones sit at 0 or 1.
    pub splits: Vec<Rational>,
    pub fixed: Vec<FixedPath>,
    /// Commodities still split, ascending.
    pub active: Vec<usize>,
}

impl PartialForm {
    pub fn solution(&self) -> RingFractionalSolution {
        RingFractionalSolution::new(self.splits.clone()).expect("splits stay in [0, 1]")
    }

    /// Loads of the fixed commodities on the original edges.
    pub fn fixed_loads(&self, ring: &RingInstance) -> Vec<Rational> {
        let mut load = vec![Rational::zero(); ring.edge_count()];
        for f in &self.fixed {
            let d = &ring.commodities()[f.commodity].demand;
            for e in ring.path_edges(f.commodity, f.choice) {
                load[e] += d;
            }
        }
        load
    }

    /// Loads of the still-split commodities on the original edges.
    pub fn active_loads(&self, ring: &RingInstance) -> Vec<Rational> {
        let mut load = vec![Rational::zero(); ring.edge_count()];
        for &i in &self.active {
            let d = &ring.commodities()[i].demand;
            let first = &self.splits[i] * d;
            let second = d - &first;
            for (e, slot) in load.iter_mut().enumerate() {
                *slot += if ring.on_first_path(i, e) { &first } else { &second };
            }
        }
        load
    }
}

/// Moves every unsplit (or zero-demand) active commodity into the fixed set.
/// Zero-demand commodities go on their clockwise path.
pub fn fix_unsplit_commodities(ring: &RingInstance, x: &RingFractionalSolution) -> Result<PartialForm, RingError> {
    if x.splits().len() != ring.commodities().len() {
        return Err(RingError::Model(crate::model::ModelError::DimensionMismatch {
            expected: ring.commodities().len(),
            found: x.splits().len(),
        }));
    }
    let mut form = PartialForm {
        splits: x.splits().to_vec(),
        fixed: Vec::new(),
        active: (0..ring.commodities().len()).collect(),
    };
    fix_pass(ring, &mut form);
    Ok(form)
}

fn fix_pass(ring: &RingInstance, form: &mut PartialForm) {
    let mut still = Vec::with_capacity(form.active.len());
    for &i in &form.active {
        let choice = if ring.commodities()[i].demand.is_zero() {
            form.splits[i] = Rational::one();
            Some(PathChoice::First)
        } else if form.splits[i].is_one() {
            Some(PathChoice::First)
        } else if form.splits[i].is_zero() {
            Some(PathChoice::Second)
        } else {
            None
        };
        match choice {
            Some(choice) => form.fixed.push(FixedPath { commodity: i, choice }),
            None => still.push(i),
        }
    }
    form.active = still;
}

/// Whether commodities `i` and `j` cross: four distinct endpoints that
/// interleave around the cycle.
pub fn commodities_cross(ring: &RingInstance, i: usize, j: usize) -> bool {
    let a = &ring.commodities()[i];
    let b = &ring.commodities()[j];
    let ends = [a.source, a.sink, b.source, b.sink];
    for x in 0..4 {
        for y in x + 1..4 {
            if ends[x] == ends[y] {
                return false;
            }
        }
    }
    let span = ring.clockwise_span(a.source, a.sink);
    let inside = |v: usize| ring.clockwise_span(a.source, v) < span;
    inside(b.source) != inside(b.sink)
}

/// Edge-disjoint paths `(P¹_i, P¹_j)` for a parallel pair, taking the
/// lexicographically smallest pair of sorted edge lists. `None` if they cross.
pub fn parallel_labeling(ring: &RingInstance, i: usize, j: usize) -> Option<(PathChoice, PathChoice)> {
    type EdgeLists = (Vec<usize>, Vec<usize>);
    let choices = [PathChoice::First, PathChoice::Second];
    let mut best: Option<(EdgeLists, (PathChoice, PathChoice))> = None;
    for a in choices {
        let pa = ring.path_edges(i, a);
        for b in choices {
            let pb = ring.path_edges(j, b);
            if pa.iter().any(|e| pb.contains(e)) {
                continue;
            }
            let key = (pa.clone(), pb);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, (a, b)));
            }
        }
    }
    best.map(|(_, labels)| labels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelShift {
    pub i: usize,
    pub j: usize,
    /// The paths flow was moved onto.
    pub first_i: PathChoice,
    pub first_j: PathChoice,
    #[serde(with = "crate::rational::serde_rational")]
    pub amount: Rational,
    pub fixed: usize,
}

fn amount_on(form: &PartialForm, ring: &RingInstance, i: usize, choice: PathChoice) -> Rational {
    let d = &ring.commodities()[i].demand;
    match choice {
        PathChoice::First => &form.splits[i] * d,
        PathChoice::Second => (Rational::one() - &form.splits[i]) * d,
    }
}

fn shift(form: &mut PartialForm, ring: &RingInstance, i: usize, onto: PathChoice, amount: &Rational) {
    let delta = amount / &ring.commodities()[i].demand;
    match onto {
        PathChoice::First => form.splits[i] += delta,
        PathChoice::Second => form.splits[i] -= delta,
    }
}

/// Shifts `m = min` of the two outer-path amounts onto the inner paths of a
/// parallel pair and fixes the commodity that becomes unsplit (the lower
/// index on a tie).
pub fn eliminate_parallel_pair(
    ring: &RingInstance,
    form: &mut PartialForm,
    i: usize,
    j: usize,
) -> Result<ParallelShift, RingError> {
    if !form.active.contains(&i) || !form.active.contains(&j) || i == j {
        return Err(RingError::NotActive(i, j));
    }
    let (first_i, first_j) = parallel_labeling(ring, i, j).ok_or(RingError::NotParallel(i, j))?;
    let outer_i = amount_on(form, ring, i, first_i.other());
    let outer_j = amount_on(form, ring, j, first_j.other());
    let (amount, fixed) = if outer_j < outer_i { (outer_j, j) } else { (outer_i, i) };
    shift(form, ring, i, first_i, &amount);
    shift(form, ring, j, first_j, &amount);
    let choice = if fixed == i { first_i } else { first_j };
    form.splits[fixed] = choice.as_split();
    form.active.retain(|&c| c != fixed);
    form.fixed.push(FixedPath {
        commodity: fixed,
        choice,
    });
    Ok(ParallelShift {
        i,
        j,
        first_i,
        first_j,
        amount,
        fixed,
    })
}

/// A ring instance in crossing canonical form together with the bookkeeping
/// that relates it to the original instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalRingForm {
    /// `None` when every commodity ended up fixed.
    pub instance: Option<RingInstance>,
    /// Canonical commodity → original commodity.
    pub commodity_map: Vec<usize>,
    /// Whether source and sink were exchanged for each canonical commodity.
    pub flipped: Vec<bool>,
    /// Canonical node → original node.
    pub node_map: Vec<usize>,
    /// Original edge → canonical edge.
    pub edge_map: Vec<usize>,
    pub fixed: Vec<FixedPath>,
    pub shifts: Vec<ParallelShift>,
    /// The reduced fractional solution on the canonical instance.
    pub x_bar: RingFractionalSolution,
    /// The preprocessed solution on the original instance.
    pub preprocessed: RingFractionalSolution,
    /// Largest demand of the original instance.
    pub d_max: Rational,
}

impl CanonicalRingForm {
    pub fn k_prime(&self) -> usize {
        self.commodity_map.len()
    }

    /// Original edges merged into canonical edge `c`.
    pub fn merged_edges(&self, c: usize) -> Vec<usize> {
        (0..self.edge_map.len()).filter(|&e| self.edge_map[e] == c).collect()
    }

    /// Original-orientation choices for the canonical commodities plus the fixed paths.
    pub fn lift(&self, original_count: usize, canonical: &RingUnsplittableSolution) -> RingUnsplittableSolution {
        let mut choices = vec![PathChoice::First; original_count];
        for f in &self.fixed {
            choices[f.commodity] = f.choice;
        }
        for (c, &choice) in canonical.choices().iter().enumerate() {
            let original = self.commodity_map[c];
            choices[original] = if self.flipped[c] { choice.other() } else { choice };
        }
        RingUnsplittableSolution::new(choices)
    }

    /// The canonical part of an original solution.
    pub fn restrict(&self, original: &RingUnsplittableSolution) -> RingUnsplittableSolution {
        RingUnsplittableSolution::new(
            self.commodity_map
                .iter()
                .zip(&self.flipped)
                .map(|(&i, &flip)| {
                    let c = original.choices()[i];
                    if flip {
                        c.other()
                    } else {
                        c
                    }
                })
                .collect(),
        )
    }

    /// Canonical loads pulled back to original edges.
    pub fn pull_back(&self, canonical_loads: &[Rational]) -> Vec<Rational> {
        self.edge_map.iter().map(|&c| canonical_loads[c].clone()).collect()
    }

    /// Loads of the fixed paths on original edges.
    pub fn fixed_loads(&self, ring: &RingInstance) -> Vec<Rational> {
        let mut load = vec![Rational::zero(); ring.edge_count()];
        for f in &self.fixed {
            let d = &ring.commodities()[f.commodity].demand;
            for e in ring.path_edges(f.commodity, f.choice) {
                load[e] += d;
            }
        }
        load
    }
}

/// Relabels and contracts an all-crossing, strictly split state.
pub fn canonicalize_crossing(ring: &RingInstance, form: &PartialForm) -> Result<CanonicalRingForm, RingError> {
    for (a, &i) in form.active.iter().enumerate() {
        let s = &form.splits[i];
        if !s.is_positive() || !(s < &Rational::one()) {
            return Err(RingError::NotStrictlySplit(i));
        }
        for &j in &form.active[a + 1..] {
            if !commodities_cross(ring, i, j) {
                return Err(RingError::NotCrossing(i, j));
            }
        }
    }
    let k = form.active.len();
    let base = CanonicalRingForm {
        instance: None,
        commodity_map: Vec::new(),
        flipped: Vec::new(),
        node_map: Vec::new(),
        edge_map: Vec::new(),
        fixed: form.fixed.clone(),
        shifts: Vec::new(),
        x_bar: RingFractionalSolution::new(Vec::new()).expect("empty"),
        preprocessed: form.solution(),
        d_max: ring.max_demand(),
    };
    if k == 0 {
        return Ok(base);
    }

    let mut ends: Vec<usize> = form
        .active
        .iter()
        .flat_map(|&i| [ring.commodities()[i].source, ring.commodities()[i].sink])
        .collect();
    ends.sort_unstable();
    let owner = |v: usize| {
        form.active
            .iter()
            .copied()
            .find(|&i| ring.commodities()[i].source == v || ring.commodities()[i].sink == v)
            .expect("every endpoint has an owner")
    };
    let mut commodity_map = Vec::with_capacity(k);
    let mut flipped = Vec::with_capacity(k);
    let mut commodities = Vec::with_capacity(k);
    let mut splits = Vec::with_capacity(k);
    for q in 0..k {
        let i = owner(ends[q]);
        let c = &ring.commodities()[i];
        let flip = c.source != ends[q];
        let other = if flip { c.source } else { c.sink };
        if other != ends[q + k] {
            return Err(RingError::NotCrossing(i, owner(ends[q + k])));
        }
        commodity_map.push(i);
        flipped.push(flip);
        commodities.push(Commodity {
            source: q,
            sink: q + k,
            demand: c.demand.clone(),
        });
        splits.push(if flip {
            Rational::one() - &form.splits[i]
        } else {
            form.splits[i].clone()
        });
    }

    let n = ring.node_count();
    let m = 2 * k;
    let mut edge_map = vec![0usize; ring.edge_count()];
    let mut edges = Vec::with_capacity(m);
    for c in 0..m {
        let start = ends[c];
        let stop = ends[(c + 1) % m];
        let mut cost = Rational::zero();
        let mut capacity: Option<Option<Rational>> = None;
        let mut e = start;
        loop {
            edge_map[e] = c;
            cost += &ring.edges()[e].cost;
            let u = ring.edges()[e].capacity.clone();
            capacity = Some(match (capacity, u) {
                (None, u) => u,
                (Some(Some(a)), Some(b)) => Some(if b < a { b } else { a }),
                _ => None,
            });
            e = (e + 1) % n;
            if e == stop {
                break;
            }
        }
        edges.push(RingEdge {
            cost,
            capacity: capacity.flatten(),
        });
    }
    let nodes = ends.iter().map(|&v| ring.nodes()[v].clone()).collect();
    let instance = RingInstance::new(nodes, edges, commodities)?;
    Ok(CanonicalRingForm {
        instance: Some(instance),
        commodity_map,
        flipped,
        node_map: ends,
        edge_map,
        x_bar: RingFractionalSolution::new(splits)?,
        ..base
    })
}

/// The whole preprocessing: fix, eliminate parallel pairs to a fixpoint
/// (pairs scanned in lexicographic order), then canonicalize.
pub fn preprocess(ring: &RingInstance, x: &RingFractionalSolution) -> Result<CanonicalRingForm, RingError> {
    let mut form = fix_unsplit_commodities(ring, x)?;
    let mut shifts = Vec::new();
    'scan: loop {
        for (a, &i) in form.active.iter().enumerate() {
            for &j in &form.active[a + 1..] {
                if parallel_labeling(ring, i, j).is_some() {
                    shifts.push(eliminate_parallel_pair(ring, &mut form, i, j)?);
                    fix_pass(ring, &mut form);
                    continue 'scan;
                }
            }
        }
        break;
    }
    let mut canonical = canonicalize_crossing(ring, &form)?;
    canonical.shifts = shifts;
    Ok(canonical)
}
