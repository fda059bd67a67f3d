//! Hexagonal multi-cell layouts, user drops and densification metrics.
//!
//! Cells are flat-topped regular hexagons described by their circumradius.
//! All five cell types tile the same total coverage area with a different
//! number of cells, so moving from type 1 to type 5 densifies the network
//! without changing the served region.
//!
//! Identifiers are zero-based: cells are `0..L`, users are `0..K` with the
//! legacy users first and the D2D pairs after them as consecutive
//! `(transmitter, receiver)` entries.

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

/// Total coverage area shared by all cell types, in km².
pub const TOTAL_AREA_KM2: f64 = 0.234;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Attempts per receiver before a pair drop is declared impossible.
const PAIR_RETRY_BUDGET: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("unknown cell type {0}; expected 1..=5")]
    UnknownCellType(u8),
    #[error("population must contain at least one user")]
    EmptyPopulation,
    #[error("could not place receiver of pair {pair} within {range_m} m after {attempts} attempts")]
    PairPlacement { pair: usize, range_m: f64, attempts: usize },
    #[error("scenario text line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Radio and geometry parameters of one of the five cell types.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellType {
    pub id: u8,
    pub radius_m: f64,
    pub num_cells: usize,
    /// Nominal eNB density as tabulated, per km².
    pub enb_density_per_km2: f64,
    pub enb_max_power_dbm: f64,
    pub enb_antenna_gain_dbi: f64,
    pub ue_max_power_dbm: f64,
    pub ue_antenna_gain_dbi: f64,
}

impl CellType {
    pub const ALL: [CellType; 5] = [
        CellType::row(1, 300.0, 1, 4.3, 23.0, 3.0),
        CellType::row(2, 212.0, 2, 8.5, 21.0, 1.8),
        CellType::row(3, 150.0, 4, 17.1, 20.0, 0.0),
        CellType::row(4, 123.0, 6, 25.6, 17.4, 0.0),
        CellType::row(5, 100.0, 9, 38.5, 14.7, 0.0),
    ];

    const fn row(id: u8, radius_m: f64, num_cells: usize, density: f64, power: f64, gain: f64) -> Self {
        Self {
            id,
            radius_m,
            num_cells,
            enb_density_per_km2: density,
            enb_max_power_dbm: power,
            enb_antenna_gain_dbi: gain,
            ue_max_power_dbm: power,
            ue_antenna_gain_dbi: gain,
        }
    }

    pub fn from_id(id: u8) -> Result<Self, TopologyError> {
        Self::ALL
            .iter()
            .find(|t| t.id == id)
            .copied()
            .ok_or(TopologyError::UnknownCellType(id))
    }

    /// Area of one hexagon, km².
    pub fn cell_area_km2(&self) -> f64 {
        hexagon_area_m2(self.radius_m) / 1e6
    }

    /// Summed hexagon area of the layout, km².
    pub fn coverage_area_km2(&self) -> f64 {
        self.num_cells as f64 * self.cell_area_km2()
    }

    /// eNB count over the nominal coverage area, per km².
    pub fn computed_enb_density(&self) -> f64 {
        self.num_cells as f64 / TOTAL_AREA_KM2
    }
}

/// Area of a regular hexagon with the given circumradius.
pub fn hexagon_area_m2(radius_m: f64) -> f64 {
    1.5 * SQRT_3 * radius_m * radius_m
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub cell_id: usize,
    pub center: Point,
    pub radius_m: f64,
    pub enb_max_power_dbm: f64,
    pub enb_antenna_gain_dbi: f64,
}

impl Cell {
    /// Closed containment test for the flat-topped hexagon.
    pub fn contains(&self, p: &Point) -> bool {
        let eps = 1e-9 * self.radius_m;
        let dx = (p.x - self.center.x).abs();
        let dy = (p.y - self.center.y).abs();
        dy <= 0.5 * SQRT_3 * self.radius_m + eps && SQRT_3 * dx + dy <= SQRT_3 * self.radius_m + eps
    }

    /// Uniform point inside the hexagon (rejection from the bounding box).
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let half_h = 0.5 * SQRT_3 * self.radius_m;
        loop {
            let p = Point::new(
                self.center.x + self.radius_m * (2.0 * rng.random::<f64>() - 1.0),
                self.center.y + half_h * (2.0 * rng.random::<f64>() - 1.0),
            );
            if self.contains(&p) {
                return p;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellLayout {
    pub cell_type: CellType,
    pub cells: Vec<Cell>,
    pub total_area_km2: f64,
    neighbors: Vec<Vec<usize>>,
}

/// Axial coordinates of the compact packings, one list per cell count.
fn packing(num_cells: usize) -> &'static [(i32, i32)] {
    match num_cells {
        1 => &[(0, 0)],
        2 => &[(0, 0), (1, 0)],
        4 => &[(0, 0), (1, 0), (1, -1), (0, 1)],
        6 => &[(0, 0), (1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1)],
        9 => &[
            (0, 0),
            (1, 0),
            (1, -1),
            (0, -1),
            (-1, 0),
            (-1, 1),
            (0, 1),
            (2, -1),
            (-2, 1),
        ],
        _ => &[],
    }
}

/// Builds the compact hexagonal layout of a cell type, centred on its centroid.
pub fn build_layout(cell_type: CellType) -> CellLayout {
    let r = cell_type.radius_m;
    let axial = packing(cell_type.num_cells);
    debug_assert_eq!(axial.len(), cell_type.num_cells);
    let raw: Vec<Point> = axial
        .iter()
        .map(|&(q, s)| Point::new(1.5 * r * q as f64, SQRT_3 * r * (s as f64 + 0.5 * q as f64)))
        .collect();
    let n = raw.len() as f64;
    let cx = raw.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = raw.iter().map(|p| p.y).sum::<f64>() / n;

    let cells: Vec<Cell> = raw
        .iter()
        .enumerate()
        .map(|(cell_id, p)| Cell {
            cell_id,
            center: Point::new(p.x - cx, p.y - cy),
            radius_m: r,
            enb_max_power_dbm: cell_type.enb_max_power_dbm,
            enb_antenna_gain_dbi: cell_type.enb_antenna_gain_dbi,
        })
        .collect();

    let neighbor_dist = SQRT_3 * r;
    let neighbors = cells
        .iter()
        .map(|a| {
            cells
                .iter()
                .filter(|b| b.cell_id != a.cell_id)
                .filter(|b| (a.center.distance(&b.center) - neighbor_dist).abs() < 1e-6 * r)
                .map(|b| b.cell_id)
                .collect()
        })
        .collect();

    CellLayout {
        cell_type,
        cells,
        total_area_km2: TOTAL_AREA_KM2,
        neighbors,
    }
}

impl CellLayout {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn radius_m(&self) -> f64 {
        self.cell_type.radius_m
    }

    /// Maximum direct-link distance; equal to the cell radius.
    pub fn d2d_range_m(&self) -> f64 {
        self.cell_type.radius_m
    }

    /// Cells sharing an edge with `cell`.
    pub fn neighbors(&self, cell: usize) -> &[usize] {
        &self.neighbors[cell]
    }

    /// Hexagon edges of `cell` without a neighbour inside the layout.
    pub fn missing_neighbors(&self, cell: usize) -> usize {
        6 - self.neighbors[cell].len()
    }

    /// Serving cell by containment; the lowest id wins on shared edges.
    pub fn serving_cell(&self, p: &Point) -> Option<usize> {
        self.cells.iter().find(|c| c.contains(p)).map(|c| c.cell_id)
    }

    pub fn covers(&self, p: &Point) -> bool {
        self.cells.iter().any(|c| c.contains(p))
    }

    /// Uniform point over the union of hexagons (all cells have equal area).
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let cell = &self.cells[rng.random_range(0..self.cells.len())];
        cell.sample_point(rng)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UeRole {
    LegacyCue,
    DueTx,
    DueRx,
}

impl UeRole {
    fn as_str(self) -> &'static str {
        match self {
            UeRole::LegacyCue => "cue",
            UeRole::DueTx => "due_tx",
            UeRole::DueRx => "due_rx",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ue {
    pub ue_id: usize,
    pub position: Point,
    pub role: UeRole,
    pub serving_cell: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairRecord {
    pub pair_id: usize,
    pub tx: usize,
    pub rx: usize,
    pub tx_cell: usize,
    pub rx_cell: usize,
    pub distance_m: f64,
    pub cross_cell: bool,
}

/// Legacy users and potential D2D pairs of one drop.
///
/// `ues` is indexed by `ue_id`; the first `num_cues` entries are the legacy
/// users.
#[derive(Clone, Debug, PartialEq)]
pub struct UePopulation {
    pub ues: Vec<Ue>,
    pub num_cues: usize,
    pub pairs: Vec<PairRecord>,
}

impl UePopulation {
    /// Assembles a population from explicit positions, for hand-built
    /// scenarios. CUEs get ids `0..cues.len()`, pair `p` gets
    /// `(n + 2p, n + 2p + 1)`.
    pub fn from_positions(
        layout: &CellLayout,
        cues: &[Point],
        pairs: &[(Point, Point)],
    ) -> Result<Self, TopologyError> {
        if cues.is_empty() && pairs.is_empty() {
            return Err(TopologyError::EmptyPopulation);
        }
        let mut ues = Vec::with_capacity(cues.len() + 2 * pairs.len());
        let serve = |p: &Point, line: usize| {
            layout.serving_cell(p).ok_or_else(|| TopologyError::Parse {
                line,
                reason: format!("position ({}, {}) lies outside the coverage area", p.x, p.y),
            })
        };
        for (i, p) in cues.iter().enumerate() {
            ues.push(Ue {
                ue_id: i,
                position: *p,
                role: UeRole::LegacyCue,
                serving_cell: serve(p, i)?,
            });
        }
        let mut records = Vec::with_capacity(pairs.len());
        for (j, (tp, rp)) in pairs.iter().enumerate() {
            let tx = ues.len();
            let tx_cell = serve(tp, tx)?;
            let rx_cell = serve(rp, tx + 1)?;
            ues.push(Ue {
                ue_id: tx,
                position: *tp,
                role: UeRole::DueTx,
                serving_cell: tx_cell,
            });
            ues.push(Ue {
                ue_id: tx + 1,
                position: *rp,
                role: UeRole::DueRx,
                serving_cell: rx_cell,
            });
            records.push(PairRecord {
                pair_id: j,
                tx,
                rx: tx + 1,
                tx_cell,
                rx_cell,
                distance_m: tp.distance(rp),
                cross_cell: tx_cell != rx_cell,
            });
        }
        Ok(Self {
            ues,
            num_cues: cues.len(),
            pairs: records,
        })
    }

    pub fn cues(&self) -> &[Ue] {
        &self.ues[..self.num_cues]
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Total user count `K = K_leg + 2 K_pair`.
    pub fn total_ues(&self) -> usize {
        self.ues.len()
    }

    /// Schedulable entities: each CUE and each pair counts once.
    pub fn num_entities(&self) -> usize {
        self.num_cues + self.pairs.len()
    }

    pub fn ue(&self, id: usize) -> &Ue {
        &self.ues[id]
    }
}

/// Drops `n_cues` legacy users and `n_pairs` potential pairs.
///
/// CUEs and pair transmitters are uniform over the coverage area. Each
/// receiver is uniform over the part of the coverage area within the D2D
/// range (the cell radius) of its transmitter.
pub fn drop_ues<R: Rng + ?Sized>(
    layout: &CellLayout,
    n_cues: usize,
    n_pairs: usize,
    rng: &mut R,
) -> Result<UePopulation, TopologyError> {
    if n_cues + n_pairs == 0 {
        return Err(TopologyError::EmptyPopulation);
    }
    let range = layout.d2d_range_m();
    let cues: Vec<Point> = (0..n_cues).map(|_| layout.sample_point(rng)).collect();
    let mut pairs = Vec::with_capacity(n_pairs);
    for pair in 0..n_pairs {
        let tx = layout.sample_point(rng);
        let rx = sample_in_disc(layout, &tx, range, rng).ok_or(TopologyError::PairPlacement {
            pair,
            range_m: range,
            attempts: PAIR_RETRY_BUDGET,
        })?;
        pairs.push((tx, rx));
    }
    UePopulation::from_positions(layout, &cues, &pairs)
}

fn sample_in_disc<R: Rng + ?Sized>(layout: &CellLayout, center: &Point, radius: f64, rng: &mut R) -> Option<Point> {
    for _ in 0..PAIR_RETRY_BUDGET {
        let r = radius * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let p = Point::new(center.x + r * theta.cos(), center.y + r * theta.sin());
        if layout.covers(&p) {
            return Some(p);
        }
    }
    None
}

/// Ratio of eNB density to user density over the same area, i.e. `L / K`.
pub fn densification_ratio(layout: &CellLayout, pop: &UePopulation) -> f64 {
    let area = layout.total_area_km2;
    (layout.num_cells() as f64 / area) / (pop.total_ues() as f64 / area)
}

/// Line-oriented scenario dump.
///
/// ```text
/// # cell_type=<id>
/// <id>,cell,<x_m>,<y_m>,<id>
/// <ue_id>,cue|due_tx|due_rx,<x_m>,<y_m>,<serving_cell>
/// ```
///
/// Pair membership is implied by id order (transmitter then receiver), so no
/// separate pair records are needed to rebuild the population. Coordinates use
/// the shortest round-trip float representation.
pub fn write_scenario(layout: &CellLayout, pop: &UePopulation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# cell_type={}", layout.cell_type.id);
    for c in &layout.cells {
        let _ = writeln!(
            out,
            "{},cell,{:?},{:?},{}",
            c.cell_id, c.center.x, c.center.y, c.cell_id
        );
    }
    for u in &pop.ues {
        let _ = writeln!(
            out,
            "{},{},{:?},{:?},{}",
            u.ue_id,
            u.role.as_str(),
            u.position.x,
            u.position.y,
            u.serving_cell
        );
    }
    out
}

/// Parses the output of [`write_scenario`].
pub fn read_scenario(text: &str) -> Result<(CellLayout, UePopulation), TopologyError> {
    let err = |line: usize, reason: &str| TopologyError::Parse {
        line: line + 1,
        reason: reason.to_string(),
    };
    let mut cell_type = None;
    let mut cues = Vec::new();
    let mut txs = Vec::new();
    let mut rxs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("cell_type=") {
                let id = v.parse::<u8>().map_err(|_| err(n, "bad cell_type"))?;
                cell_type = Some(CellType::from_id(id)?);
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(err(n, "expected 5 comma-separated fields"));
        }
        let x: f64 = fields[2].parse().map_err(|_| err(n, "bad x"))?;
        let y: f64 = fields[3].parse().map_err(|_| err(n, "bad y"))?;
        let p = Point::new(x, y);
        match fields[1] {
            "cell" => {}
            "cue" => cues.push(p),
            "due_tx" => txs.push(p),
            "due_rx" => rxs.push(p),
            _ => return Err(err(n, "unknown role")),
        }
    }
    let cell_type = cell_type.ok_or_else(|| err(0, "missing cell_type header"))?;
    if txs.len() != rxs.len() {
        return Err(err(0, "unbalanced pair records"));
    }
    let layout = build_layout(cell_type);
    let pairs: Vec<(Point, Point)> = txs.into_iter().zip(rxs).collect();
    let pop = UePopulation::from_positions(&layout, &cues, &pairs)?;
    Ok((layout, pop))
}
