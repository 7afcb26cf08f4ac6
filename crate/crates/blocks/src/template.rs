//! Block templates: feature-labeled cubical complexes.
//!
//! A template is a cuboid complex whose 2-cells may carry feature labels
//! (primal/dual boundary, domain wall, port) plus an explicit set of vertices
//! removed from the live region (interior voids). Line features on 1-cells
//! (cornerlines, transparent cornerlines, twist lines) are derived from the
//! face labels, never stored.

use crate::cell::{CellId, CubicalComplex, AXES};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Feature label on a 2-cell.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum FaceLabel {
    PrimalBoundary,
    DualBoundary,
    DomainWall,
    Port(u8),
}

/// Check color convention: even coordinate-sum volumes are primal.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Color {
    Primal,
    Dual,
}

pub fn parity_color(pos: [i32; 3]) -> Color {
    if (pos[0] + pos[1] + pos[2]).rem_euclid(2) == 0 {
        Color::Primal
    } else {
        Color::Dual
    }
}

impl FaceLabel {
    pub fn boundary_color(self) -> Option<Color> {
        match self {
            FaceLabel::PrimalBoundary => Some(Color::Primal),
            FaceLabel::DualBoundary => Some(Color::Dual),
            _ => None,
        }
    }
}

/// Line feature derived on a 1-cell.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum LineFeature {
    Cornerline,
    TransparentCornerline,
    Twist,
}

/// Names of supported block families.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BlockKind {
    Identity,
    Torus3,
    Phase,
    Hadamard,
    LatticeSurgeryZ(u8),
    LatticeSurgeryX(u8),
    Cx,
}

impl std::fmt::Display for BlockKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockKind::Identity => write!(f, "identity"),
            BlockKind::Torus3 => write!(f, "torus3"),
            BlockKind::Phase => write!(f, "phase"),
            BlockKind::Hadamard => write!(f, "hadamard"),
            BlockKind::LatticeSurgeryZ(n) => write!(f, "surgery-z{n}"),
            BlockKind::LatticeSurgeryX(n) => write!(f, "surgery-x{n}"),
            BlockKind::Cx => write!(f, "cx"),
        }
    }
}

impl std::str::FromStr for BlockKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(BlockKind::Identity),
            "torus3" => Ok(BlockKind::Torus3),
            "phase" => Ok(BlockKind::Phase),
            "hadamard" => Ok(BlockKind::Hadamard),
            "cx" => Ok(BlockKind::Cx),
            _ => {
                if let Some(n) = s.strip_prefix("surgery-z") {
                    n.parse().map(BlockKind::LatticeSurgeryZ).map_err(|e| e.to_string())
                } else if let Some(n) = s.strip_prefix("surgery-x") {
                    n.parse().map(BlockKind::LatticeSurgeryX).map_err(|e| e.to_string())
                } else {
                    Err(format!("unknown block kind `{s}`"))
                }
            }
        }
    }
}

/// A port: a rectangular patch of labeled 2-cells on one face plane.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Port {
    pub id: u8,
    /// Axis normal to the port plane.
    pub axis: usize,
    /// Vertex-plane coordinate of the port along `axis`.
    pub plane: i32,
    /// +1 if the outside lies in the positive axis direction, else -1.
    pub side: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Template {
    pub kind: BlockKind,
    pub distance: usize,
    pub complex: CubicalComplex,
    pub faces: BTreeMap<CellId, FaceLabel>,
    /// Vertices removed from the live region (interior voids).
    pub voids: BTreeSet<CellId>,
    pub ports: Vec<Port>,
}

#[derive(Error, Debug)]
pub enum TemplateError {
    #[error("malformed template: 1-cell {0:?} has label multiset PB={1} DB={2} DW={3} matching no feature case")]
    MalformedLine(CellId, usize, usize, usize),
    #[error("label on non-face cell {0:?}")]
    LabelOnNonFace(CellId),
    #[error("label outside complex on {0:?}")]
    LabelOutside(CellId),
    #[error("unlabeled surface face {0:?}")]
    UnlabeledSurface(CellId),
    #[error("boundary/port label on interior face {0:?}")]
    LabelOnInterior(CellId),
    #[error("domain wall face {0:?} adjacent to port face {1:?}")]
    WallTouchesPort(CellId, CellId),
    #[error("fully periodic template must be unlabeled with even extents")]
    BadTorus,
    #[error("port {0} is not a clean rectangular patch")]
    BadPort(u8),
}

impl Template {
    /// Vertices inside domain walls: covered by a wall face but not on a
    /// derived twist or transparent-cornerline 1-cell.
    pub fn wall_vertices(&self) -> BTreeSet<CellId> {
        let mut covered = BTreeSet::new();
        for (f, l) in &self.faces {
            if *l == FaceLabel::DomainWall {
                for e in self.complex.boundary(f) {
                    for v in self.complex.boundary(&e) {
                        covered.insert(v);
                    }
                }
            }
        }
        if covered.is_empty() {
            return covered;
        }
        let lines = self.derive_line_features().unwrap_or_default();
        for (e, feat) in &lines {
            if matches!(feat, LineFeature::Twist) {
                for v in self.complex.boundary(e) {
                    covered.remove(&v);
                }
            }
        }
        covered
    }

    /// All removed vertices: voids plus wall interiors.
    pub fn dead_vertices(&self) -> BTreeSet<CellId> {
        let mut dead = self.voids.clone();
        dead.extend(self.wall_vertices());
        dead
    }

    pub fn is_live_vertex(&self, v: &CellId, dead: &BTreeSet<CellId>) -> bool {
        self.complex.contains(v) && !dead.contains(v)
    }

    /// Derive line features on 1-cells from the face labels.
    ///
    /// Coplanar same-label pairs (flat sheet interiors) and domain-wall folds
    /// derive nothing; lone boundary labels are accepted only next to a port
    /// or at the complex rim.
    pub fn derive_line_features(&self) -> Result<BTreeMap<CellId, LineFeature>, TemplateError> {
        let mut out = BTreeMap::new();
        for e in self.complex.cells(1) {
            if let Some(feat) = self.line_feature(&e)? {
                out.insert(e, feat);
            }
        }
        Ok(out)
    }

    pub fn line_feature(&self, e: &CellId) -> Result<Option<LineFeature>, TemplateError> {
        let cob = self.complex.coboundary(e);
        let mut pb: Vec<&CellId> = Vec::new();
        let mut db: Vec<&CellId> = Vec::new();
        let mut dw: Vec<&CellId> = Vec::new();
        let mut port = false;
        for f in &cob {
            match self.faces.get(f) {
                Some(FaceLabel::PrimalBoundary) => pb.push(f),
                Some(FaceLabel::DualBoundary) => db.push(f),
                Some(FaceLabel::DomainWall) => dw.push(f),
                Some(FaceLabel::Port(_)) => port = true,
                None => {}
            }
        }
        let coplanar = |fs: &Vec<&CellId>| fs.len() == 2 && fs[0].axes == fs[1].axes;
        let feat = match (pb.len(), db.len(), dw.len()) {
            (0, 0, 0) => None,
            (1, 1, 0) => Some(LineFeature::Cornerline),
            (2, 0, 0) if coplanar(&pb) => None,
            (0, 2, 0) if coplanar(&db) => None,
            (2, 0, 0) | (0, 2, 0) => Some(LineFeature::Cornerline),
            (1, 1, 1) => Some(LineFeature::TransparentCornerline),
            (0, 0, 1) => Some(LineFeature::Twist),
            (0, 0, 2) => None, // wall interior or fold
            (1, 0, 0) | (0, 1, 0) if port || cob.len() < 4 => None,
            (p, d, w) => return Err(TemplateError::MalformedLine(*e, p, d, w)),
        };
        Ok(feat)
    }

    /// Validate the labeling: every live-surface face labeled, boundary/port
    /// labels only on surface faces, walls away from ports, line features
    /// derivable, ports rectangular.
    pub fn validate(&self) -> Result<(), TemplateError> {
        let dead = self.dead_vertices();
        // Surface coverage ignores wall-dead vertices: volumes touching a
        // domain wall stay connected to the bulk through next-to-nearest
        // fusions, so the faces around a wall are not exposed surface.
        let live_volume = |c: &CellId| -> bool {
            self.complex.contains(c)
                && self.volume_vertices(c).iter().all(|v| !self.voids.contains(v))
        };

        for (f, _) in &self.faces {
            if f.dim() != 2 {
                return Err(TemplateError::LabelOnNonFace(*f));
            }
            if !self.complex.contains(f) {
                return Err(TemplateError::LabelOutside(*f));
            }
        }

        if self.complex.periodic.iter().all(|&p| p) {
            if !self.faces.is_empty() || self.complex.extents.iter().any(|&n| n % 2 == 1) {
                return Err(TemplateError::BadTorus);
            }
            return Ok(());
        }

        // Surface coverage: every face with exactly one live adjacent volume
        // must be labeled; faces with two live volumes may only carry a wall.
        for f in self.complex.cells(2) {
            let vols = self.complex.coboundary(&f);
            let nlive = vols.iter().filter(|c| live_volume(c)).count();
            let label = self.faces.get(&f);
            // Faces whose own vertices are dead (wall/void interiors) are
            // exempt: they carry no qubits.
            let face_dead = self
                .complex
                .boundary(&f)
                .iter()
                .flat_map(|e| self.complex.boundary(e))
                .any(|v| dead.contains(&v));
            match (nlive, label) {
                (1, None) if !face_dead => return Err(TemplateError::UnlabeledSurface(f)),
                (2, Some(FaceLabel::PrimalBoundary | FaceLabel::DualBoundary | FaceLabel::Port(_))) => {
                    return Err(TemplateError::LabelOnInterior(f))
                }
                _ => {}
            }
        }

        // Walls must not touch ports.
        for (f, l) in &self.faces {
            if *l != FaceLabel::DomainWall {
                continue;
            }
            for e in self.complex.boundary(f) {
                for g in self.complex.coboundary(&e) {
                    if let Some(FaceLabel::Port(p)) = self.faces.get(&g) {
                        return Err(TemplateError::WallTouchesPort(*f, CellId::new(g.pos, g.axes))
                            .tag_port(*p));
                    }
                }
            }
        }

        self.derive_line_features()?;

        // Ports: contiguous rectangles of same-normal faces.
        for port in &self.ports {
            let faces: Vec<&CellId> = self
                .faces
                .iter()
                .filter(|(_, l)| **l == FaceLabel::Port(port.id))
                .map(|(f, _)| f)
                .collect();
            if faces.is_empty() {
                return Err(TemplateError::BadPort(port.id));
            }
            let normal = port.axis;
            if faces.iter().any(|f| f.face_normal() != normal) {
                return Err(TemplateError::BadPort(port.id));
            }
            let tang: Vec<usize> = AXES.iter().copied().filter(|&a| a != normal).collect();
            let lo = |a: usize| faces.iter().map(|f| f.pos[a]).min().unwrap();
            let hi = |a: usize| faces.iter().map(|f| f.pos[a]).max().unwrap();
            let count = tang
                .iter()
                .map(|&a| (hi(a) - lo(a) + 1) as usize)
                .product::<usize>();
            if count != faces.len() {
                return Err(TemplateError::BadPort(port.id));
            }
        }
        Ok(())
    }

    pub fn volume_vertices(&self, c: &CellId) -> Vec<CellId> {
        let mut out = Vec::with_capacity(8);
        for dx in 0..=1 {
            for dy in 0..=1 {
                for dz in 0..=1 {
                    let p = [c.pos[0] + dx, c.pos[1] + dy, c.pos[2] + dz];
                    out.push(CellId::vertex(self.complex.canon(p)));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl TemplateError {
    fn tag_port(self, _p: u8) -> Self {
        self
    }
}

/// Versioned export schema for templates. Face labels are a sorted list of
/// pairs (JSON objects cannot key on structured cell ids).
#[derive(Serialize, Deserialize)]
struct TemplateFile {
    version: u32,
    kind: BlockKind,
    distance: usize,
    extents: [usize; 3],
    periodic: [bool; 3],
    faces: Vec<(CellId, FaceLabel)>,
    voids: Vec<CellId>,
    ports: Vec<Port>,
}

pub fn export_template(t: &Template) -> String {
    let f = TemplateFile {
        version: 1,
        kind: t.kind,
        distance: t.distance,
        extents: t.complex.extents,
        periodic: t.complex.periodic,
        faces: t.faces.iter().map(|(c, l)| (*c, *l)).collect(),
        voids: t.voids.iter().copied().collect(),
        ports: t.ports.clone(),
    };
    serde_json::to_string_pretty(&f).expect("template serializes")
}

pub fn import_template(s: &str) -> Result<Template, serde_json::Error> {
    let f: TemplateFile = serde_json::from_str(s)?;
    Ok(Template {
        kind: f.kind,
        distance: f.distance,
        complex: CubicalComplex::new(f.extents, f.periodic),
        faces: f.faces.into_iter().collect(),
        voids: f.voids.into_iter().collect(),
        ports: f.ports,
    })
}
