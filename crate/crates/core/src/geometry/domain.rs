use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Grid, KeyValueConfig, Point};

/// Closed-form graph functions `ω` bounding special Lipschitz domains from below.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphFn {
    Constant(f64),
    Affine { slope: f64, offset: f64 },
    /// `offset + slope·|x − center|`
    Tent { center: f64, slope: f64, offset: f64 },
    /// `offset + amplitude·sin(2π·frequency·x)`
    Sine { amplitude: f64, frequency: f64, offset: f64 },
}

impl GraphFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            GraphFn::Constant(c) => c,
            GraphFn::Affine { slope, offset } => offset + slope * x,
            GraphFn::Tent { center, slope, offset } => offset + slope * (x - center).abs(),
            GraphFn::Sine { amplitude, frequency, offset } => {
                offset + amplitude * (2.0 * std::f64::consts::PI * frequency * x).sin()
            }
        }
    }

    /// Exact Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            GraphFn::Constant(_) => 0.0,
            GraphFn::Affine { slope, .. } | GraphFn::Tent { slope, .. } => slope.abs(),
            GraphFn::Sine { amplitude, frequency, .. } => {
                (2.0 * std::f64::consts::PI * frequency * amplitude).abs()
            }
        }
    }
}

impl fmt::Display for GraphFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFn::Constant(c) => write!(f, "flat:{c}"),
            GraphFn::Affine { slope, offset } => write!(f, "affine:{slope},{offset}"),
            GraphFn::Tent { center, slope, offset } => write!(f, "tent:{center},{slope},{offset}"),
            GraphFn::Sine { amplitude, frequency, offset } => write!(f, "sine:{amplitude},{frequency},{offset}"),
        }
    }
}

impl FromStr for GraphFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let nums = parse_numbers(args)?;
        match (kind, nums.as_slice()) {
            ("flat", [c]) => Ok(GraphFn::Constant(*c)),
            ("flat", []) => Ok(GraphFn::Constant(0.0)),
            ("affine", [slope, offset]) => Ok(GraphFn::Affine { slope: *slope, offset: *offset }),
            ("tent", [center, slope, offset]) => Ok(GraphFn::Tent { center: *center, slope: *slope, offset: *offset }),
            ("sine", [amplitude, frequency, offset]) => Ok(GraphFn::Sine {
                amplitude: *amplitude,
                frequency: *frequency,
                offset: *offset,
            }),
            _ => Err(Error::geometry(format!("unknown graph expression '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// Periodic surrogate for the whole space.
    FullTorus,
    /// Open interval `(a, b)`.
    Interval { a: f64, b: f64 },
    /// `{x : x_d > ω(x')}` clipped to the open box `(lo, hi)`. For `d = 1` the graph is
    /// evaluated at 0 and the domain is a half-line.
    SpecialLipschitz { dim: usize, graph: GraphFn, lipschitz_bound: f64, lo: Point, hi: Point },
    /// Open convex polygon, vertices counter-clockwise.
    ConvexPolygon { vertices: Vec<Point> },
}

/// A domain together with its cached diameter and convexity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainShape {
    kind: DomainKind,
    diameter: Option<f64>,
    convex: bool,
}

impl DomainShape {
    pub fn full_torus() -> Self {
        DomainShape { kind: DomainKind::FullTorus, diameter: None, convex: true }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::geometry(format!("interval needs a < b, got ({a}, {b})")));
        }
        Ok(DomainShape { kind: DomainKind::Interval { a, b }, diameter: Some(b - a), convex: true })
    }

    pub fn special_lipschitz(dim: usize, graph: GraphFn, lipschitz_bound: f64, lo: Point, hi: Point) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::geometry("special Lipschitz domains need d = 1 or 2"));
        }
        if !(lipschitz_bound.is_finite() && lipschitz_bound >= graph.lipschitz()) {
            return Err(Error::geometry(format!(
                "Lipschitz bound {lipschitz_bound} is below the graph's constant {}",
                graph.lipschitz()
            )));
        }
        if (0..dim).any(|a| !(lo[a] < hi[a])) {
            return Err(Error::geometry("clipping box needs lo < hi"));
        }
        let diameter = (0..dim).map(|a| (hi[a] - lo[a]).powi(2)).sum::<f64>().sqrt();
        Ok(DomainShape {
            kind: DomainKind::SpecialLipschitz { dim, graph, lipschitz_bound, lo, hi },
            diameter: Some(diameter),
            convex: false,
        })
    }

    /// Convex polygon from vertices in convex position (either orientation).
    pub fn convex_polygon(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::geometry("polygon needs at least three vertices"));
        }
        let m = vertices.len();
        let turns: Vec<f64> = (0..m)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % m];
                let c = vertices[(i + 2) % m];
                cross([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]])
            })
            .collect();
        let positive = turns.iter().all(|&t| t > 0.0);
        let negative = turns.iter().all(|&t| t < 0.0);
        if !positive && !negative {
            return Err(Error::geometry("polygon vertices are not in strictly convex position"));
        }
        let mut vertices = vertices;
        if negative {
            vertices.reverse();
        }
        // a convex polygon whose turns all agree can still wind twice (a pentagram)
        let winding: f64 = (0..m)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % m];
                let c = vertices[(i + 2) % m];
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - b[0], c[1] - b[1]];
                cross(u, v).atan2(u[0] * v[0] + u[1] * v[1])
            })
            .sum();
        if (winding - 2.0 * std::f64::consts::PI).abs() > 1e-9 {
            return Err(Error::geometry("polygon boundary is self-intersecting"));
        }
        let mut diameter: f64 = 0.0;
        for a in &vertices {
            for b in &vertices {
                diameter = diameter.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        Ok(DomainShape { kind: DomainKind::ConvexPolygon { vertices }, diameter: Some(diameter), convex: true })
    }

    /// Regular `k`-gon with the given circumradius, first vertex at angle `rotation`.
    pub fn regular_polygon(k: usize, center: Point, radius: f64, rotation: f64) -> Result<Self> {
        let vertices = (0..k)
            .map(|i| {
                let a = rotation + 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect();
        DomainShape::convex_polygon(vertices)
    }

    /// Regular pentagon inscribed in the circle of radius 1/2 around `(1/2, 1/2)`,
    /// pointing up.
    pub fn pentagon() -> Self {
        DomainShape::regular_polygon(5, [0.5, 0.5], 0.5, std::f64::consts::FRAC_PI_2).expect("regular pentagon")
    }

    pub fn unit_square() -> Self {
        DomainShape::convex_polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).expect("unit square")
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.kind, DomainKind::FullTorus)
    }

    /// Dimension fixed by the shape; `None` for the torus, which adapts to the grid.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            DomainKind::FullTorus => None,
            DomainKind::Interval { .. } => Some(1),
            DomainKind::SpecialLipschitz { dim, .. } => Some(*dim),
            DomainKind::ConvexPolygon { .. } => Some(2),
        }
    }

    pub fn membership(&self, x: Point) -> bool {
        match &self.kind {
            DomainKind::FullTorus => true,
            DomainKind::Interval { a, b } => *a < x[0] && x[0] < *b,
            DomainKind::SpecialLipschitz { dim, graph, lo, hi, .. } => {
                let inside_box = (0..*dim).all(|a| lo[a] < x[a] && x[a] < hi[a]);
                inside_box
                    && if *dim == 1 {
                        x[0] > graph.eval(0.0)
                    } else {
                        x[1] > graph.eval(x[0])
                    }
            }
            DomainKind::ConvexPolygon { vertices } => {
                let m = vertices.len();
                (0..m).all(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    cross([b[0] - a[0], b[1] - a[1]], [x[0] - a[0], x[1] - a[1]]) > 0.0
                })
            }
        }
    }

    /// `(diameter, convex)`; the torus has no finite diameter.
    pub fn metrics(&self) -> Result<(f64, bool)> {
        match self.diameter {
            Some(diam) => Ok((diam, self.convex)),
            None => Err(Error::geometry("the full torus has no finite diameter")),
        }
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Checks that the domain can be discretized on `grid`.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        match self.dim() {
            None if !grid.is_periodic() => Err(Error::geometry("the full torus needs a periodic grid")),
            Some(_) if grid.is_periodic() => {
                Err(Error::geometry(format!("domain '{self}' needs a non-periodic grid")))
            }
            Some(d) if d != grid.dim() => Err(Error::geometry(format!(
                "domain '{self}' is {d}-dimensional, grid is {}-dimensional",
                grid.dim()
            ))),
            _ => Ok(()),
        }
    }

    /// Membership of every grid node.
    pub fn node_mask(&self, grid: &Grid) -> Result<Vec<bool>> {
        self.check_grid(grid)?;
        Ok((0..grid.node_count()).map(|i| self.membership(grid.coords(i))).collect())
    }

    /// Nodes of `grid` inside the domain, in increasing order.
    pub fn interior_nodes(&self, grid: &Grid) -> Result<Vec<usize>> {
        let mask = self.node_mask(grid)?;
        Ok((0..grid.node_count()).filter(|&i| mask[i]).collect())
    }

    /// Axis-aligned box `[lo, lo + extent]^d` covering the domain (unit cube for the torus).
    pub fn bounding_box(&self) -> (Point, f64) {
        match &self.kind {
            DomainKind::FullTorus => ([0.0, 0.0], 1.0),
            DomainKind::Interval { a, b } => ([*a, 0.0], b - a),
            DomainKind::SpecialLipschitz { dim, lo, hi, .. } => {
                let ext = (0..*dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
                (*lo, ext)
            }
            DomainKind::ConvexPolygon { vertices } => {
                let lo = [0, 1].map(|a| vertices.iter().map(|v| v[a]).fold(f64::INFINITY, f64::min));
                let hi = [0, 1].map(|a| vertices.iter().map(|v| v[a]).fold(f64::NEG_INFINITY, f64::max));
                (lo, (hi[0] - lo[0]).max(hi[1] - lo[1]))
            }
        }
    }

    /// Standard discretization with `n` nodes per axis: the unit torus for
    /// [`DomainKind::FullTorus`], otherwise cell midpoints of the bounding box.
    pub fn default_grid(&self, d: usize, n: usize) -> Result<Grid> {
        let d = self.dim().unwrap_or(d);
        match self.kind {
            DomainKind::FullTorus => Grid::unit_torus(d, n),
            _ => {
                let (lo, extent) = self.bounding_box();
                Grid::cell_centered(d, n, lo, extent)
            }
        }
    }

    /// Reads `domain.kind` and its companions from a config; absent kind means torus.
    ///
    /// * `interval`: `domain.vertices = a; b`
    /// * `polygon`: `domain.vertices = x,y; x,y; ...`
    /// * `pentagon`, `square`, `torus`: no further keys
    /// * `lipschitz`: `domain.graph = <graph id>`, `domain.lipschitz_bound`, optional
    ///   `domain.dim` (default 2) and `domain.box = x0,y0,x1,y1` (default unit square)
    pub fn from_config(cfg: &KeyValueConfig) -> Result<Self> {
        let kind = cfg.get("domain.kind").unwrap_or("torus");
        match kind {
            "torus" => Ok(DomainShape::full_torus()),
            "pentagon" => Ok(DomainShape::pentagon()),
            "square" => Ok(DomainShape::unit_square()),
            "interval" => {
                let v = vertex_list(cfg)?;
                match v.as_slice() {
                    [a, b] if a.len() == 1 && b.len() == 1 => DomainShape::interval(a[0], b[0]),
                    [ab] if ab.len() == 2 => DomainShape::interval(ab[0], ab[1]),
                    _ => Err(Error::geometry("interval needs domain.vertices = a; b")),
                }
            }
            "polygon" => {
                let v = vertex_list(cfg)?;
                let pts = v
                    .iter()
                    .map(|p| match p.as_slice() {
                        [x, y] => Ok([*x, *y]),
                        _ => Err(Error::geometry("polygon vertices need two coordinates")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                DomainShape::convex_polygon(pts)
            }
            "lipschitz" => {
                let graph: GraphFn = cfg
                    .get("domain.graph")
                    .ok_or_else(|| Error::geometry("lipschitz domain needs domain.graph"))?
                    .parse()?;
                let bound = cfg
                    .parse_opt::<f64>("domain.lipschitz_bound")
                    .map_err(|e| Error::geometry(e.to_string()))?
                    .unwrap_or_else(|| graph.lipschitz());
                let dim = cfg.parse_or("domain.dim", 2usize).map_err(|e| Error::geometry(e.to_string()))?;
                let (lo, hi) = match cfg.get("domain.box") {
                    None => ([0.0, 0.0], [1.0, 1.0]),
                    Some(b) => match parse_numbers(b)?.as_slice() {
                        [x0, y0, x1, y1] => ([*x0, *y0], [*x1, *y1]),
                        [x0, x1] => ([*x0, 0.0], [*x1, 1.0]),
                        _ => return Err(Error::geometry("domain.box needs x0,y0,x1,y1")),
                    },
                };
                DomainShape::special_lipschitz(dim, graph, bound, lo, hi)
            }
            other => Err(Error::geometry(format!("unknown domain kind '{other}'"))),
        }
    }
}

fn vertex_list(cfg: &KeyValueConfig) -> Result<Vec<Vec<f64>>> {
    cfg.list("domain.vertices").into_iter().map(parse_numbers).collect()
}

fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::geometry(format!("bad number '{t}'"))))
        .collect()
}

fn cross(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// Compact text form: `torus`, `interval:a,b`, `pentagon`, `square`,
/// `polygon:x,y;x,y;...`, `lipschitz:<graph id>` (unit box, `d = 2`).
impl FromStr for DomainShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut cfg = KeyValueConfig::default();
        cfg.set("domain.kind", kind);
        match kind {
            "interval" => cfg.set("domain.vertices", args.replace(',', ";")),
            "polygon" => cfg.set("domain.vertices", args),
            "lipschitz" => cfg.set("domain.graph", args),
            _ => {}
        }
        DomainShape::from_config(&cfg)
    }
}

impl fmt::Display for DomainShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DomainKind::FullTorus => f.write_str("torus"),
            DomainKind::Interval { a, b } => write!(f, "interval:{a},{b}"),
            DomainKind::SpecialLipschitz { graph, .. } => write!(f, "lipschitz:{graph}"),
            DomainKind::ConvexPolygon { vertices } => {
                let v: Vec<String> = vertices.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
                write!(f, "polygon:{}", v.join(";"))
            }
        }
    }
}
