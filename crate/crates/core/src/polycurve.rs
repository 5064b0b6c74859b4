//! Piecewise-geodesic curves on the sphere and their classification relative
//! to E = {0, 1, ∞}: natural vertices and edges, convexity at a vertex, and
//! cutting against the ray `[0, +∞]`.
//!
//! Orientation follows the complex plane: a counterclockwise loop around a
//! small disk turns left at every vertex, and "left" is the inside.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::ParamCurve;
use crate::sphere::{
    exceptional_set, shortest_path, ExtPoint, GeodesicArc, SphereError, ANTIPODAL_TOL,
};

/// Point-coincidence tolerance for E-membership and ray hits.
pub const POINT_TOL: f64 = 1e-12;
/// Turns no larger than this (radians) count as straight.
pub const STRAIGHT_TOL: f64 = 1e-10;
/// Edges at least this long need an explicit orientation witness.
pub const WITNESS_THRESHOLD: f64 = PI - 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("curve degenerates to a point")]
    DegenerateCurve,
    #[error("edge {edge} has length at least π − 1e-9 and needs an orientation witness")]
    MissingWitness { edge: usize },
    #[error("edge {edge}: {source}")]
    Edge { edge: usize, source: SphereError },
    #[error("vertex {vertex} has an adjacent edge of length ≥ π")]
    AntipodalNeighbors { vertex: usize },
    #[error("vertex {vertex} is an endpoint of an open path")]
    OpenEndpoint { vertex: usize },
    #[error("vertex index {vertex} out of range")]
    VertexOutOfRange { vertex: usize },
    #[error("curve backtracks at vertex {vertex}, which is not in E")]
    Backtracking { vertex: usize },
    #[error("edge {edge} runs tangentially to the ray [0, +∞] within tolerance")]
    NonTransversal { edge: usize },
    #[error("witness list has {got} entries for {expected} edges")]
    WitnessCount { expected: usize, got: usize },
    #[error("invalid polygon JSON: {0}")]
    Parse(String),
}

/// A closed curve or open path made of geodesic arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPolygon {
    vertices: Vec<ExtPoint>,
    edges: Vec<GeodesicArc>,
    closed: bool,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<ExtPoint>,
    closed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witnesses: Option<Vec<Option<[f64; 3]>>>,
}

fn is_exceptional(p: &ExtPoint) -> bool {
    p.is_exceptional(POINT_TOL)
}

fn snap_to_e(p: ExtPoint) -> ExtPoint {
    exceptional_set()
        .into_iter()
        .find(|e| e.distance(&p) <= POINT_TOL)
        .unwrap_or(p)
}

impl GeodesicPolygon {
    /// Joins consecutive vertices by shortest paths.
    pub fn new(vertices: Vec<ExtPoint>, closed: bool) -> Result<Self, PolyError> {
        let n_edges = edge_count(vertices.len(), closed);
        Self::with_witnesses(vertices, closed, vec![None; n_edges])
    }

    /// Like [`new`](Self::new) but with an optional rotation-axis witness per
    /// edge, needed for edges of length near or beyond π.
    pub fn with_witnesses(
        vertices: Vec<ExtPoint>,
        closed: bool,
        witnesses: Vec<Option<Vector3<f64>>>,
    ) -> Result<Self, PolyError> {
        if vertices.is_empty() {
            return Err(PolyError::DegenerateCurve);
        }
        let n_edges = edge_count(vertices.len(), closed);
        if witnesses.len() != n_edges {
            return Err(PolyError::WitnessCount {
                expected: n_edges,
                got: witnesses.len(),
            });
        }
        let mut edges = Vec::with_capacity(n_edges);
        for (i, w) in witnesses.into_iter().enumerate() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            let arc = match w {
                Some(normal) => GeodesicArc::with_normal(a, b, normal),
                None => {
                    if a.distance(&b) >= WITNESS_THRESHOLD {
                        return Err(PolyError::MissingWitness { edge: i });
                    }
                    shortest_path(&a, &b)
                }
            }
            .map_err(|source| PolyError::Edge { edge: i, source })?;
            edges.push(arc);
        }
        Ok(Self {
            vertices,
            edges,
            closed,
        })
    }

    /// Builds a polygon from arcs that already chain end to start.
    pub fn from_arcs(arcs: Vec<GeodesicArc>, closed: bool) -> Result<Self, PolyError> {
        if arcs.is_empty() {
            return Err(PolyError::DegenerateCurve);
        }
        let mut vertices: Vec<ExtPoint> = arcs.iter().map(|a| *a.start()).collect();
        if !closed {
            vertices.push(*arcs.last().expect("nonempty").end());
        }
        Ok(Self {
            vertices,
            edges: arcs,
            closed,
        })
    }

    /// Geodesic polygon inscribed in a parametric curve with consecutive
    /// vertices at most `max_chord` radians apart. The curve is sampled at
    /// its breakpoints, so corners are kept as vertices.
    pub fn inscribed(curve: &ParamCurve, closed: bool, max_chord: f64) -> Result<Self, PolyError> {
        let mut ts = vec![0.0];
        ts.extend(curve.breakpoints().iter().copied().filter(|t| *t > 0.0 && *t < 1.0));
        ts.push(1.0);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let mut points = Vec::new();
        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let p0 = curve.point(t0);
            let p1 = curve.point(t1);
            // seed with a uniform split so closed or folded pieces get refined
            const SEED: usize = 16;
            let seeds: Vec<(f64, ExtPoint)> = (0..=SEED)
                .map(|k| {
                    let t = t0 + (t1 - t0) * k as f64 / SEED as f64;
                    (t, if k == 0 { p0 } else if k == SEED { p1 } else { curve.point(t) })
                })
                .collect();
            let mut stack: Vec<_> = seeds
                .windows(2)
                .rev()
                .map(|w| (w[0].0, w[1].0, w[0].1, w[1].1))
                .collect();
            let mut piece = vec![p0];
            // depth-first refinement, left half first, keeps points in order
            while let Some((a, b, pa, pb)) = stack.pop() {
                if pa.distance(&pb) <= max_chord || b - a < 1e-15 {
                    piece.push(pb);
                } else {
                    let m = 0.5 * (a + b);
                    let pm = curve.point(m);
                    stack.push((m, b, pm, pb));
                    stack.push((a, m, pa, pm));
                }
            }
            if !points.is_empty() {
                piece.remove(0);
            }
            points.extend(piece);
        }
        if closed && points.len() > 1 {
            let first = points[0];
            if points.last().expect("nonempty").distance(&first) <= POINT_TOL {
                points.pop();
            }
        }
        let points: Vec<ExtPoint> = points.into_iter().map(snap_to_e).collect();
        let mut cleaned: Vec<ExtPoint> = Vec::with_capacity(points.len());
        for p in points {
            if cleaned.last().is_none_or(|q| q.distance(&p) > POINT_TOL) {
                cleaned.push(p);
            }
        }
        Self::new(cleaned, closed)
    }

    pub fn vertices(&self) -> &[ExtPoint] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GeodesicArc] {
        &self.edges
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges.iter().map(GeodesicArc::length).collect()
    }

    pub fn length(&self) -> f64 {
        self.edges.iter().map(GeodesicArc::length).sum()
    }

    /// Same curve traversed the other way.
    pub fn reversed(&self) -> Self {
        let arcs: Vec<GeodesicArc> = self.edges.iter().rev().map(GeodesicArc::reversed).collect();
        Self::from_arcs(arcs, self.closed).expect("nonempty")
    }

    /// Points along the curve no more than `spacing` radians apart,
    /// including every vertex.
    pub fn sample(&self, spacing: f64) -> Vec<Vector3<f64>> {
        let mut out = Vec::new();
        for arc in &self.edges {
            let k = (arc.length() / spacing).ceil().max(1.0) as usize;
            for j in 0..k {
                out.push(arc.point_at(arc.length() * j as f64 / k as f64));
            }
        }
        if !self.closed {
            out.push(*self.edges.last().expect("nonempty").end().vector());
        }
        out
    }

    fn incoming(&self, v: usize) -> Option<&GeodesicArc> {
        if v > 0 {
            Some(&self.edges[v - 1])
        } else if self.closed {
            self.edges.last()
        } else {
            None
        }
    }

    fn outgoing(&self, v: usize) -> Option<&GeodesicArc> {
        self.edges.get(v)
    }

    /// Signed turning angle at a vertex, positive for left turns; `±π` means
    /// the curve doubles back. `None` at endpoints of an open path.
    pub fn turn_at(&self, v: usize) -> Option<f64> {
        let (inc, out) = (self.incoming(v)?, self.outgoing(v)?);
        let b = self.vertices[v].vector();
        let t_in = inc.normal().cross(b);
        let t_out = out.normal().cross(b);
        Some(t_in.cross(&t_out).dot(&-b).atan2(t_in.dot(&t_out)))
    }

    /// Removes zero-length edges, inserts points of E lying inside edges,
    /// and merges straight joints at vertices outside E.
    pub fn normalize(&self) -> Result<Self, PolyError> {
        // 1. snap and drop repeated vertices
        let mut arcs: Vec<GeodesicArc> = Vec::new();
        for arc in &self.edges {
            if arc.length() <= POINT_TOL {
                continue;
            }
            arcs.push(*arc);
        }
        if arcs.is_empty() {
            return Err(PolyError::DegenerateCurve);
        }
        let arcs: Vec<GeodesicArc> = arcs
            .into_iter()
            .map(|a| {
                GeodesicArc::with_normal(snap_to_e(*a.start()), snap_to_e(*a.end()), *a.normal())
                    .unwrap_or(a)
            })
            .collect();

        // 2. split edges at interior points of E
        let mut split = Vec::with_capacity(arcs.len());
        for arc in arcs {
            let mut cuts: Vec<(f64, ExtPoint)> = exceptional_set()
                .into_iter()
                .filter_map(|e| {
                    arc.locate(e.vector(), POINT_TOL)
                        .filter(|&s| s > POINT_TOL && s < arc.length() - POINT_TOL)
                        .map(|s| (s, e))
                })
                .collect();
            cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut start = *arc.start();
            for (_, e) in cuts {
                split.push(GeodesicArc::with_normal(start, e, *arc.normal()).expect("on arc"));
                start = e;
            }
            split.push(GeodesicArc::with_normal(start, *arc.end(), *arc.normal()).expect("on arc"));
        }

        // 3. reject doubling back away from E, merge straight joints
        let poly = Self::from_arcs(split, self.closed)?;
        for v in 0..poly.vertices.len() {
            if let Some(t) = poly.turn_at(v) {
                if PI - t.abs() <= STRAIGHT_TOL && !is_exceptional(&poly.vertices[v]) {
                    return Err(PolyError::Backtracking { vertex: v });
                }
            }
        }
        let min_edges = if self.closed { 3 } else { 1 };
        let mut arcs = poly.edges;
        loop {
            let n = arcs.len();
            if n <= min_edges {
                break;
            }
            let joints = if self.closed { n } else { n - 1 };
            let mut merged = false;
            for j in 0..joints {
                let (i_in, i_out) = if self.closed { ((j + n - 1) % n, j) } else { (j, j + 1) };
                let v = arcs[i_out].start();
                if is_exceptional(v) {
                    continue;
                }
                let (a, b) = (arcs[i_in], arcs[i_out]);
                let same_circle = (a.normal() - b.normal()).norm() <= STRAIGHT_TOL;
                let total = a.length() + b.length();
                if !same_circle || total >= TAU - 1e-9 {
                    continue;
                }
                let joined = GeodesicArc::with_normal(*a.start(), *b.end(), *a.normal())
                    .map_err(|source| PolyError::Edge { edge: i_in, source })?;
                if self.closed && i_out == 0 {
                    arcs[0] = joined;
                    arcs.pop();
                } else {
                    arcs[i_in] = joined;
                    arcs.remove(i_out);
                }
                merged = true;
                break;
            }
            if !merged {
                break;
            }
        }
        Self::from_arcs(arcs, self.closed)
    }

    /// Natural vertices are points of E, open-path endpoints and vertices
    /// where the curve is not straight; natural edges run between them.
    pub fn natural_partition(&self) -> NaturalPartition {
        let n = self.vertices.len();
        let natural: Vec<bool> = (0..n)
            .map(|v| {
                is_exceptional(&self.vertices[v])
                    || self.turn_at(v).is_none_or(|t| t.abs() > STRAIGHT_TOL)
            })
            .collect();
        let lengths = self.edge_lengths();
        let mut edges = Vec::new();
        let Some(first) = natural.iter().position(|&b| b) else {
            return NaturalPartition {
                natural,
                edges: vec![NaturalEdge {
                    start: None,
                    end: None,
                    edge_indices: (0..lengths.len()).collect(),
                    length: lengths.iter().sum(),
                }],
            };
        };
        let m = lengths.len();
        let mut current = NaturalEdge {
            start: Some(first),
            end: None,
            edge_indices: Vec::new(),
            length: 0.0,
        };
        for k in 0..m {
            let e = (first + k) % m;
            current.edge_indices.push(e);
            current.length += lengths[e];
            let next_v = (e + 1) % n;
            let at_end = !self.closed && e + 1 == n - 1;
            if natural[next_v] || at_end {
                let end = if at_end { n - 1 } else { next_v };
                current.end = Some(end);
                edges.push(std::mem::replace(
                    &mut current,
                    NaturalEdge {
                        start: Some(end),
                        end: None,
                        edge_indices: Vec::new(),
                        length: 0.0,
                    },
                ));
                if at_end {
                    break;
                }
            }
        }
        NaturalPartition { natural, edges }
    }

    /// Classifies the joint at a vertex by its signed turn.
    pub fn is_convex_at(&self, v: usize) -> Result<Convexity, PolyError> {
        if v >= self.vertices.len() {
            return Err(PolyError::VertexOutOfRange { vertex: v });
        }
        let (Some(inc), Some(out)) = (self.incoming(v), self.outgoing(v)) else {
            return Err(PolyError::OpenEndpoint { vertex: v });
        };
        if inc.length() >= PI - ANTIPODAL_TOL || out.length() >= PI - ANTIPODAL_TOL {
            return Err(PolyError::AntipodalNeighbors { vertex: v });
        }
        let t = self.turn_at(v).expect("interior vertex");
        Ok(if t.abs() <= STRAIGHT_TOL {
            Convexity::Straight
        } else if t > 0.0 && PI - t > STRAIGHT_TOL {
            Convexity::StrictlyConvex
        } else {
            Convexity::NonConvex
        })
    }

    /// Checks convexity at every interior vertex whose point satisfies
    /// `region`.
    pub fn is_locally_convex_in(
        &self,
        region: impl Fn(&ExtPoint) -> bool,
    ) -> Result<LocalConvexity, PolyError> {
        let mut offenders = Vec::new();
        for v in 0..self.vertices.len() {
            if self.turn_at(v).is_none() || !region(&self.vertices[v]) {
                continue;
            }
            if self.is_convex_at(v)? == Convexity::NonConvex {
                offenders.push(v);
            }
        }
        Ok(LocalConvexity {
            holds: offenders.is_empty(),
            offenders,
        })
    }

    /// Splits the curve into maximal arcs off the ray `[0, +∞]` and the arcs
    /// running along it.
    pub fn cut_against_ray(&self) -> Result<RayCut, PolyError> {
        let total = self.length();
        let mut events: Vec<f64> = Vec::new();
        let mut offset = 0.0;
        for (i, arc) in self.edges.iter().enumerate() {
            let len = arc.length();
            let a = *arc.start().vector();
            let b = arc.normal().cross(&a);
            let tilt = (arc.normal().x.powi(2) + arc.normal().z.powi(2)).sqrt();
            let mut hits = Vec::new();
            if tilt <= POINT_TOL {
                // edge on the great circle through 0, 1, ∞; split where x1 = 0
                for s in circle_zeros(a.x, b.x, len) {
                    hits.push(s);
                }
                for s in [0.0, len] {
                    if on_ray(&arc.point_at(s)) {
                        hits.push(s);
                    }
                }
            } else if tilt < 1e-9 {
                return Err(PolyError::NonTransversal { edge: i });
            } else {
                for s in circle_zeros(a.y, b.y, len) {
                    if arc.point_at(s).x >= -POINT_TOL {
                        hits.push(s);
                    }
                }
                for s in [0.0, len] {
                    if on_ray(&arc.point_at(s)) {
                        hits.push(s);
                    }
                }
            }
            events.extend(hits.into_iter().map(|s| offset + s));
            offset += len;
        }
        let starts: Vec<f64> = self
            .edges
            .iter()
            .scan(0.0, |acc, a| {
                let s = *acc;
                *acc += a.length();
                Some(s)
            })
            .collect();
        let point_at = |u: f64| -> Vector3<f64> {
            let u = u.clamp(0.0, total);
            let k = starts.partition_point(|&s| s <= u).saturating_sub(1);
            let arc = &self.edges[k];
            arc.point_at((u - starts[k]).min(arc.length()))
        };

        for u in events.iter_mut() {
            if self.closed && *u >= total - POINT_TOL {
                *u = 0.0;
            }
        }
        events.sort_by(f64::total_cmp);
        events.dedup_by(|x, y| (*x - *y).abs() <= POINT_TOL);

        let mut bounds = events.clone();
        if !self.closed || bounds.is_empty() {
            bounds.insert(0, 0.0);
            bounds.push(total);
            bounds.dedup_by(|x, y| (*x - *y).abs() <= POINT_TOL);
        } else {
            let first = bounds[0];
            bounds.push(first + total);
        }
        let mut pieces: Vec<RayArc> = bounds
            .windows(2)
            .filter(|w| w[1] - w[0] > POINT_TOL)
            .map(|w| {
                let mid = point_at((0.5 * (w[0] + w[1])) % total.max(f64::MIN_POSITIVE));
                RayArc {
                    from: w[0] % total,
                    length: w[1] - w[0],
                    on_ray: on_ray_loose(&mid),
                }
            })
            .collect();
        if pieces.is_empty() {
            pieces.push(RayArc {
                from: 0.0,
                length: total,
                on_ray: false,
            });
        }

        // merge neighbouring on-ray pieces, wrapping around for closed curves
        let mut arcs: Vec<RayArc> = Vec::new();
        for p in pieces {
            match arcs.last_mut() {
                Some(last) if last.on_ray && p.on_ray => last.length += p.length,
                _ => arcs.push(p),
            }
        }
        if self.closed && arcs.len() > 1 && !events.is_empty() {
            let (first, last) = (arcs[0], *arcs.last().expect("nonempty"));
            if first.on_ray && last.on_ray {
                arcs[0].from = last.from;
                arcs[0].length += last.length;
                arcs.pop();
            }
        }
        // contact points are the arc boundaries that lie on the ray
        let is_event = |u: f64| {
            let u = if self.closed { u.rem_euclid(total) } else { u };
            let k = events.partition_point(|&e| e < u - POINT_TOL);
            events.get(k).is_some_and(|&e| (e - u).abs() <= POINT_TOL)
                || (self.closed && events.first().is_some_and(|&e| e <= POINT_TOL) && u >= total - POINT_TOL)
        };
        let mut intersections: Vec<ExtPoint> = Vec::new();
        for u in arcs.iter().flat_map(|a| [a.from, a.from + a.length]) {
            if !is_event(u) {
                continue;
            }
            let at = if self.closed { u.rem_euclid(total) } else { u };
            let p = snap_to_e(ExtPoint::from_vector(point_at(at)));
            if intersections.iter().all(|q| q.distance(&p) > POINT_TOL) {
                intersections.push(p);
            }
        }
        Ok(RayCut {
            arcs,
            intersections,
            total_length: total,
        })
    }

    pub fn to_json(&self) -> String {
        let witnesses: Vec<Option<[f64; 3]>> = self
            .edges
            .iter()
            .map(|a| {
                (a.length() >= WITNESS_THRESHOLD).then(|| {
                    let n = a.normal();
                    [n.x, n.y, n.z]
                })
            })
            .collect();
        let doc = PolygonJson {
            vertices: self.vertices.clone(),
            closed: self.closed,
            witnesses: witnesses.iter().any(Option::is_some).then_some(witnesses),
        };
        serde_json::to_string(&doc).expect("polygon serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PolyError> {
        let doc: PolygonJson =
            serde_json::from_str(text).map_err(|e| PolyError::Parse(e.to_string()))?;
        let n_edges = edge_count(doc.vertices.len(), doc.closed);
        let witnesses = match doc.witnesses {
            Some(w) => w.into_iter().map(|o| o.map(Vector3::from)).collect(),
            None => vec![None; n_edges],
        };
        Self::with_witnesses(doc.vertices, doc.closed, witnesses)
    }
}

fn edge_count(n_vertices: usize, closed: bool) -> usize {
    if closed {
        n_vertices
    } else {
        n_vertices.saturating_sub(1)
    }
}

fn on_ray(p: &Vector3<f64>) -> bool {
    p.y.abs() <= POINT_TOL && p.x >= -POINT_TOL
}

fn on_ray_loose(p: &Vector3<f64>) -> bool {
    p.y.abs() <= 1e-9 && p.x >= -1e-9
}

/// Zeros in the open interval `(0, len)` of `c·cos s + d·sin s`.
fn circle_zeros(c: f64, d: f64, len: f64) -> Vec<f64> {
    let r = c.hypot(d);
    if r == 0.0 {
        return Vec::new();
    }
    // c cos s + d sin s = r cos(s − φ), zero at φ ± π/2
    let phi = d.atan2(c);
    let mut out = Vec::new();
    for base in [phi + PI / 2.0, phi - PI / 2.0] {
        let s = base.rem_euclid(TAU);
        if s > POINT_TOL && s < len - POINT_TOL {
            out.push(s);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Outcome of [`GeodesicPolygon::is_convex_at`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convexity {
    StrictlyConvex,
    Straight,
    NonConvex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalConvexity {
    pub holds: bool,
    pub offenders: Vec<usize>,
}

/// A run of edges between consecutive natural vertices. Endpoints are `None`
/// only for a closed curve without natural vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalEdge {
    pub start: Option<usize>,
    pub end: Option<usize>,
    pub edge_indices: Vec<usize>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaturalPartition {
    pub natural: Vec<bool>,
    pub edges: Vec<NaturalEdge>,
}

impl NaturalPartition {
    pub fn natural_vertices(&self) -> Vec<usize> {
        (0..self.natural.len()).filter(|&i| self.natural[i]).collect()
    }
}

/// A maximal piece of the curve either along the ray or off it; `from` is
/// the arc-length position where it starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayArc {
    pub from: f64,
    pub length: f64,
    pub on_ray: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayCut {
    pub arcs: Vec<RayArc>,
    pub intersections: Vec<ExtPoint>,
    pub total_length: f64,
}

impl RayCut {
    pub fn off_ray_lengths(&self) -> Vec<f64> {
        self.arcs.iter().filter(|a| !a.on_ray).map(|a| a.length).collect()
    }

    pub fn on_ray_length(&self) -> f64 {
        self.arcs.iter().filter(|a| a.on_ray).map(|a| a.length).sum()
    }
}
