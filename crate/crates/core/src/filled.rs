//! Cycle cells on completely marked boards.
//!
//! Every complete orientation without sinks or sources has a cycle cell.
//! [`find_cycle_cell`] finds one constructively: trace a directed cycle
//! with the clockwise selection rule, shrink it until it is
//! inside-absorbing, then repeatedly trace backwards inside its gut until
//! the gut is empty. Each step is recorded so the result can be audited.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Board, CellId, EdgeId, VertexId};
use crate::geometry::{point_in_polygon, signed_area, Point, Turning};
use crate::rules::{cycle_cells_of, Marking, Move};

/// Largest board [`enumerate_orientations`] accepts.
pub const MAX_ENUMERATION_EDGES: usize = 20;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FilledError {
    #[error("orientation has {got} arcs but the board has {want} edges")]
    WrongLength { got: usize, want: usize },
    #[error("arc {index} does not join the endpoints of edge {edge}")]
    NotEndpoints { index: usize, edge: usize },
    #[error("edge {0} is given twice")]
    DuplicateEdge(usize),
    #[error("edge {0} has no arc")]
    MissingEdge(usize),
    #[error("vertex {0} is a sink")]
    Sink(usize),
    #[error("vertex {0} is a source")]
    Source(usize),
    #[error("board has no cells")]
    NoCells,
    #[error("enumeration is limited to {limit} edges, board has {edges}")]
    TooManyEdges { edges: usize, limit: usize },
    #[error("search made no progress: {0}")]
    Stalled(String),
}

/// A direction on every edge, with no sink and no source.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    tails: Vec<VertexId>,
    heads: Vec<VertexId>,
}

impl Orientation {
    /// Builds an orientation from one arc per edge, in any order.
    pub fn new(board: &Board, arcs: &[Move]) -> Result<Orientation, FilledError> {
        let e = board.edge_count();
        if arcs.len() != e {
            return Err(FilledError::WrongLength { got: arcs.len(), want: e });
        }
        let mut tails = vec![None; e];
        let mut heads = vec![VertexId(0); e];
        for (index, m) in arcs.iter().enumerate() {
            if m.edge.0 >= e {
                return Err(FilledError::NotEndpoints { index, edge: m.edge.0 });
            }
            let [a, b] = board.endpoints(m.edge);
            if !((m.tail, m.head) == (a, b) || (m.tail, m.head) == (b, a)) {
                return Err(FilledError::NotEndpoints { index, edge: m.edge.0 });
            }
            if tails[m.edge.0].replace(m.tail).is_some() {
                return Err(FilledError::DuplicateEdge(m.edge.0));
            }
            heads[m.edge.0] = m.head;
        }
        let tails = tails
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or(FilledError::MissingEdge(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let o = Orientation { tails, heads };
        o.check(board)?;
        Ok(o)
    }

    /// Reads a completely marked position.
    pub fn from_markings(board: &Board, markings: &[Marking]) -> Result<Orientation, FilledError> {
        let arcs = markings
            .iter()
            .enumerate()
            .map(|(i, m)| match *m {
                Marking::Directed { tail, head } => Ok(Move::new(EdgeId(i), tail, head)),
                Marking::Unmarked => Err(FilledError::MissingEdge(i)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Orientation::new(board, &arcs)
    }

    fn check(&self, board: &Board) -> Result<(), FilledError> {
        for v in board.vertices() {
            let ins = board.rotation(v).iter().filter(|e| self.heads[e.0] == v).count();
            if ins == board.degree(v) {
                return Err(FilledError::Sink(v.0));
            }
            if ins == 0 {
                return Err(FilledError::Source(v.0));
            }
        }
        Ok(())
    }

    pub fn tail(&self, e: EdgeId) -> VertexId {
        self.tails[e.0]
    }

    pub fn head(&self, e: EdgeId) -> VertexId {
        self.heads[e.0]
    }

    pub fn len(&self) -> usize {
        self.tails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }

    /// Arcs in edge order.
    pub fn arcs(&self) -> Vec<Move> {
        (0..self.len()).map(|i| Move::new(EdgeId(i), self.tails[i], self.heads[i])).collect()
    }

    pub fn markings(&self) -> Vec<Marking> {
        (0..self.len()).map(|i| Marking::Directed { tail: self.tails[i], head: self.heads[i] }).collect()
    }
}

/// Which way to sweep around a vertex when choosing the next arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    Clockwise,
    Counterclockwise,
}

/// A simple directed cycle: `vertices[i] -> vertices[i + 1]` along
/// `edges[i]`, wrapping around.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedCycle {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub turning: Turning,
    pub enclosed_cells: Vec<CellId>,
}

impl DirectedCycle {
    /// Builds the cycle through `vertices` and computes its turning and
    /// enclosed cells. Panics if consecutive vertices are not adjacent.
    fn from_vertices(board: &Board, vertices: Vec<VertexId>) -> DirectedCycle {
        let k = vertices.len();
        let edges: Vec<EdgeId> = (0..k)
            .map(|i| board.edge_between(vertices[i], vertices[(i + 1) % k]).expect("cycle vertices adjacent"))
            .collect();
        let polygon: Vec<Point> = vertices.iter().map(|&v| board.point(v)).collect();
        let turning =
            if signed_area(&polygon).map_or(0.0, |a| a) > 0.0 { Turning::Counterclockwise } else { Turning::Clockwise };
        let mut cycle = DirectedCycle { vertices, edges, turning, enclosed_cells: Vec::new() };
        let region = Region::new(board, &cycle);
        cycle.enclosed_cells = board.cell_ids().filter(|&c| region.contains_cell(board, c)).collect();
        cycle
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Checks that the cycle is simple and every arc agrees with `o`.
    pub fn is_valid_for(&self, board: &Board, o: &Orientation) -> bool {
        let k = self.vertices.len();
        if k < 3 || self.edges.len() != k {
            return false;
        }
        let distinct: HashSet<_> = self.vertices.iter().collect();
        distinct.len() == k
            && (0..k).all(|i| {
                let (u, v, e) = (self.vertices[i], self.vertices[(i + 1) % k], self.edges[i]);
                board.edge_between(u, v) == Some(e) && o.tail(e) == u && o.head(e) == v
            })
    }
}

/// The closed region bounded by a simple cycle.
struct Region {
    polygon: Vec<Point>,
    on_cycle: Vec<bool>,
    cycle_edges: HashSet<EdgeId>,
}

impl Region {
    fn new(board: &Board, cycle: &DirectedCycle) -> Region {
        let mut on_cycle = vec![false; board.vertex_count()];
        for v in &cycle.vertices {
            on_cycle[v.0] = true;
        }
        Region {
            polygon: cycle.vertices.iter().map(|&v| board.point(v)).collect(),
            on_cycle,
            cycle_edges: cycle.edges.iter().copied().collect(),
        }
    }

    fn vertex_inside(&self, board: &Board, v: VertexId) -> bool {
        !self.on_cycle[v.0] && point_in_polygon(&self.polygon, board.point(v))
    }

    /// Off-cycle edges never touch the cycle except at endpoints, so their
    /// midpoint decides which side they are on.
    fn edge_inside(&self, board: &Board, e: EdgeId) -> bool {
        if self.cycle_edges.contains(&e) {
            return false;
        }
        let [a, b] = board.endpoints(e);
        point_in_polygon(&self.polygon, board.point(a).midpoint(board.point(b)))
    }

    fn edge_in_closure(&self, board: &Board, e: EdgeId) -> bool {
        self.cycle_edges.contains(&e) || self.edge_inside(board, e)
    }

    /// A cell is inside exactly when one of its off-cycle edges is; a cell
    /// with no such edge is bounded by the cycle itself.
    fn contains_cell(&self, board: &Board, c: CellId) -> bool {
        match board.cell(c).edges().find(|e| !self.cycle_edges.contains(e)) {
            Some(e) => self.edge_inside(board, e),
            None => true,
        }
    }
}

/// First edge met sweeping around `v` from `from` (exclusive) in the given
/// sense that satisfies `want`.
fn sweep(
    board: &Board,
    v: VertexId,
    from: EdgeId,
    rule: SelectionRule,
    mut want: impl FnMut(EdgeId) -> bool,
) -> Option<EdgeId> {
    let rot = board.rotation(v);
    let d = rot.len();
    let i = rot.iter().position(|&e| e == from).expect("edge at vertex");
    (1..=d)
        .map(|k| match rule {
            // the stored rotation runs counterclockwise
            SelectionRule::Clockwise => rot[(i + d - k % d) % d],
            SelectionRule::Counterclockwise => rot[(i + k) % d],
        })
        .find(|&e| e != from && want(e))
}

/// Next arc out of the head of `incoming`, sweeping clockwise from it.
pub fn cw_next(board: &Board, o: &Orientation, incoming: EdgeId) -> EdgeId {
    next_arc(board, o, incoming, SelectionRule::Clockwise)
}

/// Next arc out of the head of `incoming`, sweeping counterclockwise.
pub fn ccw_next(board: &Board, o: &Orientation, incoming: EdgeId) -> EdgeId {
    next_arc(board, o, incoming, SelectionRule::Counterclockwise)
}

fn next_arc(board: &Board, o: &Orientation, incoming: EdgeId, rule: SelectionRule) -> EdgeId {
    let v = o.head(incoming);
    sweep(board, v, incoming, rule, |e| o.tail(e) == v).expect("no sinks, so an outgoing arc exists")
}

/// Follows the selection rule from `start` until a vertex repeats, and
/// returns the cycle so closed.
pub fn trace_cycle(board: &Board, o: &Orientation, start: EdgeId, rule: SelectionRule) -> DirectedCycle {
    walk(board, o, start, rule, |_| true)
}

fn walk(
    board: &Board,
    o: &Orientation,
    start: EdgeId,
    rule: SelectionRule,
    mut allowed: impl FnMut(EdgeId) -> bool,
) -> DirectedCycle {
    let mut path = vec![o.tail(start), o.head(start)];
    let mut seen: HashSet<VertexId> = path.iter().copied().collect();
    let mut incoming = start;
    loop {
        let v = o.head(incoming);
        let next = sweep(board, v, incoming, rule, |e| o.tail(e) == v && allowed(e))
            .expect("every vertex in the region has an outgoing arc in it");
        let w = o.head(next);
        if !seen.insert(w) {
            let from = path.iter().position(|&x| x == w).expect("seen vertex on path");
            return DirectedCycle::from_vertices(board, path.split_off(from));
        }
        path.push(w);
        incoming = next;
    }
}

/// Whether every edge inside `cycle` that touches it points at the cycle.
pub fn is_inside_absorbing(board: &Board, o: &Orientation, cycle: &DirectedCycle) -> bool {
    first_leak(board, o, cycle).is_none()
}

/// Index in `cycle.vertices` of the first vertex with an inside edge
/// pointing away from it.
fn first_leak(board: &Board, o: &Orientation, cycle: &DirectedCycle) -> Option<usize> {
    let region = Region::new(board, cycle);
    cycle
        .vertices
        .iter()
        .position(|&v| board.rotation(v).iter().any(|&e| o.tail(e) == v && region.edge_inside(board, e)))
}

/// What is left inside a cycle after removing everything that touches it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gut {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub cells: Vec<CellId>,
}

impl Gut {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub fn gut(board: &Board, cycle: &DirectedCycle) -> Gut {
    let region = Region::new(board, cycle);
    let inside: Vec<bool> = board.vertices().map(|v| region.vertex_inside(board, v)).collect();
    let vertices = board.vertices().filter(|v| inside[v.0]).collect();
    let edges = board.edge_ids().filter(|&e| board.endpoints(e).iter().all(|v| inside[v.0])).collect();
    let cells =
        cycle.enclosed_cells.iter().copied().filter(|&c| board.cell(c).vertices().all(|v| inside[v.0])).collect();
    Gut { vertices, edges, cells }
}

/// How a cycle in a certificate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Clockwise trace from the least edge.
    Trace,
    /// Retrace inside the previous cycle, which leaked.
    Retrace,
    /// Backward trace inside the previous cycle's gut.
    GutTrace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    pub rule: SelectionRule,
    pub cycle: DirectedCycle,
    pub inside_absorbing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCellCertificate {
    pub cell: CellId,
    pub direction: Turning,
    pub steps: Vec<Step>,
}

impl CycleCellCertificate {
    /// Re-checks every step against the board and orientation: cycles valid,
    /// absorption flags truthful, enclosed cells strictly shrinking, and the
    /// last cycle bounding exactly the reported cell.
    pub fn check(&self, board: &Board, o: &Orientation) -> Result<(), String> {
        let mut prev: Option<&DirectedCycle> = None;
        for (i, step) in self.steps.iter().enumerate() {
            let c = &step.cycle;
            if !c.is_valid_for(board, o) {
                return Err(format!("step {i}: not a directed cycle"));
            }
            if DirectedCycle::from_vertices(board, c.vertices.clone()) != *c {
                return Err(format!("step {i}: turning or enclosed cells misreported"));
            }
            if step.inside_absorbing != is_inside_absorbing(board, o, c) {
                return Err(format!("step {i}: absorption flag is wrong"));
            }
            if let Some(p) = prev {
                let fewer = c.enclosed_cells.len() < p.enclosed_cells.len();
                let nested = c.enclosed_cells.iter().all(|x| p.enclosed_cells.contains(x));
                if !fewer || !nested {
                    return Err(format!("step {i}: enclosed cells did not shrink"));
                }
            }
            prev = Some(c);
        }
        let last = self.steps.last().ok_or("empty certificate")?;
        if !last.inside_absorbing || last.cycle.enclosed_cells != [self.cell] {
            return Err("last cycle does not bound the reported cell".into());
        }
        let mut boundary: Vec<EdgeId> = board.cell(self.cell).edges().collect();
        let mut ours = last.cycle.edges.clone();
        boundary.sort();
        ours.sort();
        if boundary != ours || last.cycle.turning != self.direction {
            return Err("last cycle is not the cell boundary".into());
        }
        Ok(())
    }
}

fn interior_rule(cycle: &DirectedCycle) -> SelectionRule {
    // the clockwise sweep turns left, toward the inside of a counterclockwise cycle
    match cycle.turning {
        Turning::Counterclockwise => SelectionRule::Clockwise,
        Turning::Clockwise => SelectionRule::Counterclockwise,
    }
}

/// Finds a cycle cell by shrinking directed cycles, returning the cell, its
/// direction, and every intermediate cycle.
pub fn find_cycle_cell(board: &Board, o: &Orientation) -> Result<CycleCellCertificate, FilledError> {
    if board.cell_count() == 0 {
        return Err(FilledError::NoCells);
    }
    if o.len() != board.edge_count() {
        return Err(FilledError::WrongLength { got: o.len(), want: board.edge_count() });
    }
    o.check(board)?;

    let start = EdgeId(0);
    let first = trace_cycle(board, o, start, SelectionRule::Clockwise);
    let mut steps = vec![Step {
        kind: StepKind::Trace,
        rule: SelectionRule::Clockwise,
        inside_absorbing: is_inside_absorbing(board, o, &first),
        cycle: first,
    }];
    // every iteration strictly shrinks the enclosed cell set
    for _ in 0..=board.cell_count() {
        let current = &steps.last().expect("nonempty").cycle;
        let (kind, rule, next) = match first_leak(board, o, current) {
            Some(i) => {
                // enter the leaking vertex along the cycle, so the sweep
                // leaves through an inside arc
                let k = current.len();
                let incoming = current.edges[(i + k - 1) % k];
                let region = Region::new(board, current);
                let rule = interior_rule(current);
                let next = walk(board, o, incoming, rule, |e| region.edge_in_closure(board, e));
                (StepKind::Retrace, rule, next)
            }
            None => {
                let g = gut(board, current);
                if g.is_empty() {
                    let [cell] = current.enclosed_cells[..] else {
                        return Err(FilledError::Stalled(format!(
                            "empty gut but {} enclosed cells",
                            current.enclosed_cells.len()
                        )));
                    };
                    let direction = current.turning;
                    return Ok(CycleCellCertificate { cell, direction, steps });
                }
                (StepKind::GutTrace, SelectionRule::Clockwise, backward_gut_trace(board, o, &g))
            }
        };
        steps.push(Step { kind, rule, inside_absorbing: is_inside_absorbing(board, o, &next), cycle: next });
    }
    Err(FilledError::Stalled("enclosed cell count failed to decrease".into()))
}

/// Walks against the arrows from the least gut vertex, sweeping clockwise
/// for the next incoming arc, and returns the directed cycle found.
fn backward_gut_trace(board: &Board, o: &Orientation, g: &Gut) -> DirectedCycle {
    let in_gut: HashSet<VertexId> = g.vertices.iter().copied().collect();
    let v0 = g.vertices[0];
    let first =
        *board.rotation(v0).iter().filter(|&&e| o.head(e) == v0).min().expect("no sources, so an incoming arc exists");
    // backward path, newest vertex last
    let mut path = vec![v0, o.tail(first)];
    let mut seen: HashSet<VertexId> = path.iter().copied().collect();
    let mut via = first;
    loop {
        let v = o.tail(via);
        debug_assert!(in_gut.contains(&v));
        let prev = sweep(board, v, via, SelectionRule::Clockwise, |e| o.head(e) == v && in_gut.contains(&o.tail(e)))
            .expect("gut vertices have incoming arcs from the gut");
        let u = o.tail(prev);
        if !seen.insert(u) {
            let from = path.iter().position(|&x| x == u).expect("seen vertex on path");
            let mut cycle = path.split_off(from);
            cycle.reverse();
            return DirectedCycle::from_vertices(board, cycle);
        }
        path.push(u);
        via = prev;
    }
}

/// Every cycle cell of a complete orientation, by direct inspection.
pub fn oracle_cycle_cell(board: &Board, o: &Orientation) -> Vec<(CellId, Turning)> {
    cycle_cells_of(board, &o.markings())
}

/// Per-vertex position of its last incident edge in `order`, used to test a
/// vertex as soon as it is fully oriented.
fn completion_points(board: &Board, order: &[EdgeId]) -> Vec<Vec<VertexId>> {
    let mut pos = vec![0; board.edge_count()];
    for (i, e) in order.iter().enumerate() {
        pos[e.0] = i;
    }
    let mut done = vec![Vec::new(); order.len()];
    for v in board.vertices() {
        if let Some(last) = board.rotation(v).iter().map(|e| pos[e.0]).max() {
            done[last].push(v);
        }
    }
    done
}

fn saturated_ok(board: &Board, heads: &[Option<VertexId>], v: VertexId) -> bool {
    let ins = board.rotation(v).iter().filter(|e| heads[e.0] == Some(v)).count();
    ins != 0 && ins != board.degree(v)
}

/// Depth-first enumeration of all complete orientations without sinks or
/// sources, edges in id order, lower endpoint as tail first.
pub struct Orientations<'a> {
    board: &'a Board,
    completes: Vec<Vec<VertexId>>,
    heads: Vec<Option<VertexId>>,
    /// Next choice to try at each depth: 0, 1, or 2 for exhausted.
    choice: Vec<u8>,
    depth: usize,
    finished: bool,
}

impl<'a> Orientations<'a> {
    fn assign(&mut self, e: EdgeId, c: u8) -> bool {
        let [a, b] = self.board.endpoints(e);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.heads[e.0] = Some(if c == 0 { hi } else { lo });
        self.completes[e.0].iter().all(|&v| saturated_ok(self.board, &self.heads, v))
    }
}

impl Iterator for Orientations<'_> {
    type Item = Orientation;

    fn next(&mut self) -> Option<Orientation> {
        let n = self.heads.len();
        loop {
            if self.finished {
                return None;
            }
            if self.depth == n {
                let heads: Vec<VertexId> = self.heads.iter().map(|h| h.expect("assigned")).collect();
                let tails = (0..n).map(|i| self.board.other_end(EdgeId(i), heads[i])).collect();
                // resume by backtracking from the leaf
                if n == 0 {
                    self.finished = true;
                } else {
                    self.depth -= 1;
                }
                return Some(Orientation { tails, heads });
            }
            let d = self.depth;
            let c = self.choice[d];
            if c >= 2 {
                self.heads[d] = None;
                self.choice[d] = 0;
                if d == 0 {
                    self.finished = true;
                } else {
                    self.depth -= 1;
                }
                continue;
            }
            self.choice[d] = c + 1;
            if self.assign(EdgeId(d), c) {
                self.depth += 1;
            }
        }
    }
}

/// Lazily enumerates every complete orientation with no sink and no source.
pub fn enumerate_orientations(board: &Board) -> Result<Orientations<'_>, FilledError> {
    let n = board.edge_count();
    if n > MAX_ENUMERATION_EDGES {
        return Err(FilledError::TooManyEdges { edges: n, limit: MAX_ENUMERATION_EDGES });
    }
    let order: Vec<EdgeId> = board.edge_ids().collect();
    Ok(Orientations {
        board,
        completes: completion_points(board, &order),
        heads: vec![None; n],
        choice: vec![0; n],
        depth: 0,
        finished: false,
    })
}

/// A random complete orientation, reproducible from `seed`, or `None` when
/// the board has none (some vertex of degree below 2).
///
/// Edges are decided in a random order with random first choices; a vertex
/// left with one undecided edge and all others the same way forces that edge.
/// A search exceeding its node budget restarts with fresh randomness.
pub fn sample_orientation(board: &Board, seed: u64) -> Option<Orientation> {
    if board.vertices().any(|v| board.degree(v) < 2) {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 64 * board.edge_count().max(1);
    loop {
        let mut order: Vec<EdgeId> = board.edge_ids().collect();
        order.shuffle(&mut rng);
        let flips: Vec<bool> = order.iter().map(|_| rng.random()).collect();
        let mut s = Sampler { board, heads: vec![None; board.edge_count()], trail: Vec::new(), nodes: 0, budget };
        match s.search(&order, &flips, 0) {
            Some(true) => {
                let heads: Vec<VertexId> = s.heads.into_iter().map(|h| h.expect("assigned")).collect();
                let tails = board.edge_ids().map(|e| board.other_end(e, heads[e.0])).collect();
                return Some(Orientation { tails, heads });
            }
            Some(false) => return None,
            None => continue,
        }
    }
}

struct Sampler<'a> {
    board: &'a Board,
    heads: Vec<Option<VertexId>>,
    trail: Vec<EdgeId>,
    nodes: usize,
    budget: usize,
}

impl Sampler<'_> {
    /// `None` when the budget runs out.
    fn search(&mut self, order: &[EdgeId], flips: &[bool], mut i: usize) -> Option<bool> {
        while i < order.len() && self.heads[order[i].0].is_some() {
            i += 1;
        }
        let Some(&e) = order.get(i) else { return Some(true) };
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let [a, b] = self.board.endpoints(e);
        let tries = if flips[i] { [a, b] } else { [b, a] };
        for h in tries {
            let mark = self.trail.len();
            if self.set(e, h) {
                match self.search(order, flips, i + 1) {
                    Some(false) => {}
                    done => return done,
                }
            }
            for e in self.trail.drain(mark..) {
                self.heads[e.0] = None;
            }
        }
        Some(false)
    }

    /// Assigns and propagates forced edges; false on a sink or source.
    fn set(&mut self, e: EdgeId, head: VertexId) -> bool {
        let mut queue = vec![(e, head)];
        while let Some((e, head)) = queue.pop() {
            match self.heads[e.0] {
                Some(h) if h == head => continue,
                Some(_) => return false,
                None => {}
            }
            self.heads[e.0] = Some(head);
            self.trail.push(e);
            for v in self.board.endpoints(e) {
                let (mut ins, mut outs, mut open) = (0, 0, None);
                for &f in self.board.rotation(v) {
                    match self.heads[f.0] {
                        Some(h) if h == v => ins += 1,
                        Some(_) => outs += 1,
                        None => open = Some((f, open.is_some())),
                    }
                }
                match open {
                    None if ins == 0 || outs == 0 => return false,
                    Some((f, false)) if outs == 0 => queue.push((f, self.board.other_end(f, v))),
                    Some((f, false)) if ins == 0 => queue.push((f, v)),
                    _ => {}
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn arcs(board: &Board, pairs: &[(usize, usize)]) -> Orientation {
        let moves: Vec<Move> = pairs
            .iter()
            .map(|&(t, h)| {
                let e = board.edge_between(VertexId(t), VertexId(h)).unwrap();
                Move::new(e, VertexId(t), VertexId(h))
            })
            .collect();
        Orientation::new(board, &moves).unwrap()
    }

    #[test]
    fn cycles_have_two_orientations() {
        for n in 3..=7 {
            let b = generators::cycle(n).unwrap();
            let all: Vec<_> = enumerate_orientations(&b).unwrap().collect();
            assert_eq!(all.len(), 2, "C_{n}");
        }
    }

    #[test]
    fn single_edge_has_none() {
        let b = Board::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], vec![(0, 1)]).unwrap();
        assert_eq!(enumerate_orientations(&b).unwrap().count(), 0);
        assert!(sample_orientation(&b, 3).is_none());
    }

    #[test]
    fn triangle_cycle_found() {
        let b = generators::cycle(3).unwrap();
        let o = arcs(&b, &[(0, 1), (1, 2), (2, 0)]);
        let cert = find_cycle_cell(&b, &o).unwrap();
        assert_eq!(cert.cell, CellId(0));
        cert.check(&b, &o).unwrap();
        assert_eq!(oracle_cycle_cell(&b, &o), vec![(CellId(0), cert.direction)]);
        assert!(gut(&b, &cert.steps[0].cycle).is_empty());
    }

    #[test]
    fn degree_two_vertex_has_one_choice() {
        let b = generators::cycle(4).unwrap();
        let o = arcs(&b, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let e01 = b.edge_between(VertexId(0), VertexId(1)).unwrap();
        let e12 = b.edge_between(VertexId(1), VertexId(2)).unwrap();
        assert_eq!(cw_next(&b, &o, e01), e12);
        assert_eq!(ccw_next(&b, &o, e01), e12);
    }

    #[test]
    fn leaking_cycle_is_not_absorbing() {
        // K4 with the outer triangle cyclic and the center pushing outward
        let b = generators::k4();
        let o = arcs(&b, &[(1, 2), (2, 3), (3, 1), (0, 1), (2, 0), (3, 0)]);
        let outer = DirectedCycle::from_vertices(&b, vec![VertexId(1), VertexId(2), VertexId(3)]);
        assert_eq!(outer.enclosed_cells.len(), 3);
        assert!(!is_inside_absorbing(&b, &o, &outer));
        let cert = find_cycle_cell(&b, &o).unwrap();
        cert.check(&b, &o).unwrap();
        assert!(oracle_cycle_cell(&b, &o).contains(&(cert.cell, cert.direction)));
    }

    #[test]
    fn rejects_sinks() {
        let b = generators::cycle(3).unwrap();
        let moves = vec![
            Move::new(EdgeId(0), VertexId(0), VertexId(1)),
            Move::new(EdgeId(1), VertexId(2), VertexId(1)),
            Move::new(EdgeId(2), VertexId(2), VertexId(0)),
        ];
        let moves: Vec<Move> =
            moves.into_iter().map(|m| Move::new(b.edge_between(m.tail, m.head).unwrap(), m.tail, m.head)).collect();
        assert!(matches!(Orientation::new(&b, &moves), Err(FilledError::Sink(1))));
    }

    #[test]
    fn sampling_is_reproducible() {
        let b = generators::grid(2, 2).unwrap();
        let a = sample_orientation(&b, 9).unwrap();
        assert_eq!(Some(a.clone()), sample_orientation(&b, 9));
        let distinct: HashSet<_> = (0..30).filter_map(|s| sample_orientation(&b, s)).collect();
        assert!(distinct.len() > 1);
    }
}
