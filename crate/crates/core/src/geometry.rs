//! Conductor masks, dielectric maps and scene descriptions.
//!
//! An ideal conductor is imposed by freezing to zero every link that lies in
//! its surface: for a face with normal `n`, all links whose direction differs
//! from `n` and whose endpoints both lie in the face (the face is extended over
//! all of y and t). Only surfaces are frozen; the interior of a tooth is left
//! to decouple from the exterior.
//!
//! Gratings are combs in the `(x, z)` cross-section, uniform in y and t. A
//! tooth of width `L1` spans the `L1 + 1` sites `x0 ..= x0 + L1`, followed by a
//! well of width `L2`. Coordinates along z are taken modulo `N_z`, so a grating
//! whose base plane sits at `z = N_z` shares its back with one at `z = 0`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{LatticeShape, SimulationParams, T, X, Y, Z};

/// Links frozen at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMask {
    shape: LatticeShape,
    frozen: Vec<bool>,
    count: usize,
}

impl BoundaryMask {
    pub fn empty(shape: LatticeShape) -> Self {
        Self {
            frozen: vec![false; shape.link_count()],
            count: 0,
            shape,
        }
    }

    #[inline]
    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    pub fn insert(&mut self, dir: usize, site: usize) {
        let i = self.shape.link_index(dir, site);
        if !self.frozen[i] {
            self.frozen[i] = true;
            self.count += 1;
        }
    }

    #[inline]
    pub fn contains_link(&self, link: usize) -> bool {
        self.frozen[link]
    }

    #[inline]
    pub fn contains(&self, dir: usize, site: usize) -> bool {
        self.frozen[self.shape.link_index(dir, site)]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub(crate) fn as_slice(&self) -> &[bool] {
        &self.frozen
    }

    pub fn links(&self) -> impl Iterator<Item = usize> + '_ {
        self.frozen
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
    }

    pub fn union(&self, other: &BoundaryMask) -> Result<BoundaryMask> {
        self.shape.check_same(&other.shape)?;
        let frozen: Vec<bool> = self
            .frozen
            .iter()
            .zip(&other.frozen)
            .map(|(&a, &b)| a || b)
            .collect();
        let count = frozen.iter().filter(|&&f| f).count();
        Ok(BoundaryMask {
            shape: self.shape,
            frozen,
            count,
        })
    }

    pub fn intersection_len(&self, other: &BoundaryMask) -> usize {
        self.frozen
            .iter()
            .zip(&other.frozen)
            .filter(|(&a, &b)| a && b)
            .count()
    }

    /// The mask moved by `dx` lattice steps along x, with wrap.
    pub fn translated_x(&self, dx: i64) -> BoundaryMask {
        let s = self.shape;
        let mut out = BoundaryMask::empty(s);
        for link in self.links() {
            let (dir, site) = s.link_parts(link);
            let c = s.coords(site);
            let moved = s.site_index_wrapped([c[0] as i64 + dx, c[1] as i64, c[2] as i64, c[3] as i64]);
            out.insert(dir, moved);
        }
        out
    }

    /// The mask mirrored by `x -> -x`. An x-link from `x` to `x+1` becomes
    /// the x-link from `-x-1` to `-x`.
    pub fn reflected_x(&self) -> BoundaryMask {
        let s = self.shape;
        let mut out = BoundaryMask::empty(s);
        for link in self.links() {
            let (dir, site) = s.link_parts(link);
            let c = s.coords(site);
            let x = if dir == X { -(c[0] as i64) - 1 } else { -(c[0] as i64) };
            out.insert(dir, s.site_index_wrapped([x, c[1] as i64, c[2] as i64, c[3] as i64]));
        }
        out
    }
}

/// Normal direction of an axis-aligned face in the `(x, z)` cross-section.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceNormal {
    X,
    Z,
}

/// A face extended over all y and t. For a `Z` face, `at` is the z-plane and
/// `from..=to` the x-sites it covers (`to` may exceed `N_x`; wrap applies);
/// for an `X` face, `at` is the x-plane and `from..=to` the z-sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub normal: FaceNormal,
    pub at: i64,
    pub from: i64,
    pub to: i64,
}

impl Face {
    /// Full z-plane face covering every x.
    fn plane(z: i64, nx: usize) -> Self {
        Face {
            normal: FaceNormal::Z,
            at: z,
            from: 0,
            to: nx as i64,
        }
    }

    /// Tangential links of the face: `(direction, site)` pairs.
    pub fn links(&self, shape: &LatticeShape) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        let (ny, nt) = (shape.extent(Y) as i64, shape.extent(T) as i64);
        let (along, normal_dir) = match self.normal {
            FaceNormal::Z => (X, Z),
            FaceNormal::X => (Z, X),
        };
        debug_assert_ne!(along, normal_dir);
        let site = |a: i64, y: i64, t: i64| -> usize {
            match self.normal {
                FaceNormal::Z => shape.site_index_wrapped([a, y, self.at, t]),
                FaceNormal::X => shape.site_index_wrapped([self.at, y, a, t]),
            }
        };
        for y in 0..ny {
            for t in 0..nt {
                for a in self.from..=self.to {
                    let s = site(a, y, t);
                    out.insert((Y, s));
                    out.insert((T, s));
                    if a < self.to {
                        out.insert((along, s));
                    }
                }
            }
        }
        out
    }
}

fn mask_from_faces(shape: LatticeShape, faces: &[Face]) -> BoundaryMask {
    let mut mask = BoundaryMask::empty(shape);
    for face in faces {
        for (dir, site) in face.links(&shape) {
            mask.insert(dir, site);
        }
    }
    mask
}

/// Two conducting planes normal to z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatePairSpec {
    pub z_low: usize,
    pub z_high: usize,
}

impl PlatePairSpec {
    pub fn new(z_low: usize, z_high: usize) -> Self {
        Self { z_low, z_high }
    }

    pub fn separation(&self) -> usize {
        self.z_high.saturating_sub(self.z_low)
    }

    pub fn validate(&self, shape: &LatticeShape) -> Result<()> {
        let nz = shape.extent(Z);
        if self.z_low >= self.z_high {
            return Err(Error::Geometry(format!(
                "plate pair needs z_low < z_high, got {} and {}",
                self.z_low, self.z_high
            )));
        }
        if self.z_high >= nz {
            return Err(Error::Geometry(format!(
                "plate at z={} outside lattice with N_z={nz}",
                self.z_high
            )));
        }
        Ok(())
    }
}

/// Links with direction x, y or t in the plane `z`.
pub fn build_plate_mask(z: usize, shape: &LatticeShape) -> Result<BoundaryMask> {
    if z >= shape.extent(Z) {
        return Err(Error::Geometry(format!(
            "plate at z={z} outside lattice with N_z={}",
            shape.extent(Z)
        )));
    }
    let mut mask = BoundaryMask::empty(*shape);
    for site in 0..shape.volume() {
        if shape.coord(site, Z) == z {
            for dir in [X, Y, T] {
                mask.insert(dir, site);
            }
        }
    }
    Ok(mask)
}

pub fn build_plate_pair_mask(spec: &PlatePairSpec, shape: &LatticeShape) -> Result<BoundaryMask> {
    spec.validate(shape)?;
    build_plate_mask(spec.z_low, shape)?.union(&build_plate_mask(spec.z_high, shape)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Teeth rise from the base towards +z.
    Up,
    /// Teeth hang from the base towards -z.
    Down,
}

/// A rectangular comb: teeth of width `tooth_width` and height
/// `tooth_height` separated by wells of width `gap_width`, all in lattice
/// steps (x in `a`, z in `a_z`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GratingSpec {
    pub tooth_width: usize,
    pub gap_width: usize,
    pub tooth_height: usize,
    pub base_z: usize,
    pub orientation: Orientation,
    pub lateral_shift: i64,
}

impl GratingSpec {
    pub fn period(&self) -> usize {
        self.tooth_width + self.gap_width
    }

    pub fn with_shift(mut self, shift: i64) -> Self {
        self.lateral_shift = shift;
        self
    }

    /// z-coordinate of the tooth tips, unwrapped (may be negative or >= N_z).
    pub fn tip_z(&self) -> i64 {
        match self.orientation {
            Orientation::Up => self.base_z as i64 + self.tooth_height as i64,
            Orientation::Down => self.base_z as i64 - self.tooth_height as i64,
        }
    }

    pub fn validate(&self, shape: &LatticeShape) -> Result<()> {
        if self.tooth_width < 1 || self.gap_width < 1 {
            return Err(Error::Geometry(format!(
                "tooth and gap widths must be >= 1, got {} and {}",
                self.tooth_width, self.gap_width
            )));
        }
        let nx = shape.extent(X);
        if !nx.is_multiple_of(self.period()) {
            return Err(Error::Geometry(format!(
                "grating period {} does not divide N_x = {nx}",
                self.period()
            )));
        }
        if self.base_z > shape.extent(Z) {
            return Err(Error::Geometry(format!(
                "grating base z={} outside lattice with N_z={}",
                self.base_z,
                shape.extent(Z)
            )));
        }
        if self.tooth_height >= shape.extent(Z) {
            return Err(Error::Geometry(format!(
                "tooth height {} does not fit in N_z={}",
                self.tooth_height,
                shape.extent(Z)
            )));
        }
        Ok(())
    }

    /// Start x of every tooth, in `0..N_x`.
    pub fn tooth_starts(&self, nx: usize) -> Vec<i64> {
        let p = self.period() as i64;
        (0..(nx / self.period()) as i64)
            .map(|k| (self.lateral_shift + k * p).rem_euclid(nx as i64))
            .collect()
    }

    /// Whether the column at x lies strictly inside or on a tooth (`x0..=x0+L1`).
    pub fn is_tooth_column(&self, x: i64, nx: usize) -> bool {
        let p = self.period() as i64;
        let local = (x - self.lateral_shift).rem_euclid(p);
        debug_assert_eq!(nx % self.period(), 0);
        local <= self.tooth_width as i64
    }

    /// The surface of the comb as axis-aligned faces.
    pub fn faces(&self, shape: &LatticeShape) -> Result<Vec<Face>> {
        self.validate(shape)?;
        let nx = shape.extent(X);
        let base = self.base_z as i64;
        let tip = self.tip_z();
        if self.tooth_height == 0 {
            return Ok(vec![Face::plane(base, nx)]);
        }
        let (l1, p) = (self.tooth_width as i64, self.period() as i64);
        let (z_lo, z_hi) = (base.min(tip), base.max(tip));
        let mut faces = Vec::new();
        for x0 in self.tooth_starts(nx) {
            faces.push(Face {
                normal: FaceNormal::Z,
                at: tip,
                from: x0,
                to: x0 + l1,
            });
            faces.push(Face {
                normal: FaceNormal::Z,
                at: base,
                from: x0 + l1,
                to: x0 + p,
            });
            for xf in [x0, x0 + l1] {
                faces.push(Face {
                    normal: FaceNormal::X,
                    at: xf,
                    from: z_lo,
                    to: z_hi,
                });
            }
        }
        Ok(faces)
    }

    /// Frozen links of the comb as a solid conductor: the whole base plane
    /// and every link with both ends in the same closed tooth box. This
    /// contains the tangential links of every face in [`Self::faces`];
    /// freezing the tooth interiors as well keeps the teeth from acting as
    /// hollow cavities that open through the base.
    pub fn mask(&self, shape: &LatticeShape) -> Result<BoundaryMask> {
        self.validate(shape)?;
        let nx = shape.extent(X);
        let base = self.base_z as i64;
        let mut mask = mask_from_faces(*shape, &[Face::plane(base, nx)]);
        if self.tooth_height == 0 {
            return Ok(mask);
        }
        let tip = self.tip_z();
        let (z_lo, z_hi) = (base.min(tip), base.max(tip));
        let l1 = self.tooth_width as i64;
        let (ny, nt) = (shape.extent(Y) as i64, shape.extent(T) as i64);
        for x0 in self.tooth_starts(nx) {
            for x in x0..=x0 + l1 {
                for z in z_lo..=z_hi {
                    for y in 0..ny {
                        for t in 0..nt {
                            let site = shape.site_index_wrapped([x, y, z, t]);
                            mask.insert(Y, site);
                            mask.insert(T, site);
                            if x < x0 + l1 {
                                mask.insert(X, site);
                            }
                            if z < z_hi {
                                mask.insert(Z, site);
                            }
                        }
                    }
                }
            }
        }
        Ok(mask)
    }
}

/// Vacuum gap between the tips of two facing gratings, measured along +z
/// from the upward comb to the downward one (modulo `N_z`).
pub fn grating_tip_gap(up: &GratingSpec, down: &GratingSpec, shape: &LatticeShape) -> Result<i64> {
    if up.orientation != Orientation::Up || down.orientation != Orientation::Down {
        return Err(Error::Geometry(
            "grating pair needs one comb facing +z below one facing -z".into(),
        ));
    }
    let nz = shape.extent(Z) as i64;
    let mut bases = (down.base_z as i64 - up.base_z as i64).rem_euclid(nz);
    if bases == 0 {
        bases = nz;
    }
    Ok(bases - up.tooth_height as i64 - down.tooth_height as i64)
}

pub fn build_grating_pair_mask(
    bottom: &GratingSpec,
    top: &GratingSpec,
    shape: &LatticeShape,
) -> Result<BoundaryMask> {
    bottom.validate(shape)?;
    top.validate(shape)?;
    let gap = grating_tip_gap(bottom, top, shape)?;
    if gap < 1 {
        return Err(Error::Geometry(format!(
            "gratings interpenetrate: tip separation {gap} < 1"
        )));
    }
    bottom.mask(shape)?.union(&top.mask(shape)?)
}

/// Axis-aligned spatial box `[lo, hi)` in lattice units, extended over t.
/// A site belongs to it iff its cell centre `coord + 1/2` does.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl BoxRegion {
    /// A slab covering all x and y between `z_lo` and `z_hi`.
    pub fn z_slab(z_lo: f64, z_hi: f64, shape: &LatticeShape) -> Self {
        Self {
            lo: [0.0, 0.0, z_lo],
            hi: [shape.extent(X) as f64, shape.extent(Y) as f64, z_hi],
        }
    }

    pub fn whole(shape: &LatticeShape) -> Self {
        Self {
            lo: [0.0; 3],
            hi: [
                shape.extent(X) as f64,
                shape.extent(Y) as f64,
                shape.extent(Z) as f64,
            ],
        }
    }

    pub fn contains_cell(&self, coords: [usize; 3]) -> bool {
        (0..3).all(|d| {
            let c = coords[d] as f64 + 0.5;
            self.lo[d] <= c && c < self.hi[d]
        })
    }

    fn validate(&self, shape: &LatticeShape) -> Result<()> {
        for d in 0..3 {
            let n = shape.extent(d) as f64;
            if !(self.lo[d] >= 0.0 && self.hi[d] <= n && self.lo[d] <= self.hi[d]) {
                return Err(Error::Geometry(format!(
                    "dielectric region {self:?} outside lattice {shape}"
                )));
            }
        }
        Ok(())
    }
}

/// Static permittivity per spatial site, uniform in Euclidean time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DielectricMap {
    shape: LatticeShape,
    eps: Vec<f64>,
}

impl DielectricMap {
    pub fn vacuum(shape: LatticeShape) -> Self {
        Self {
            eps: vec![1.0; shape.spatial_volume()],
            shape,
        }
    }

    #[inline]
    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    #[inline]
    pub fn at_spatial(&self, spatial: usize) -> f64 {
        self.eps[spatial]
    }

    pub fn at_site(&self, site: usize) -> f64 {
        self.eps[self.shape.spatial_index(site)]
    }

    pub fn is_vacuum(&self) -> bool {
        self.eps.iter().all(|&e| e == 1.0)
    }

    fn overlay(&mut self, region: &BoxRegion, epsilon: f64) -> Result<()> {
        let (nx, ny, nz) = (self.shape.extent(X), self.shape.extent(Y), self.shape.extent(Z));
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    if region.contains_cell([x, y, z]) {
                        let i = (x * ny + y) * nz + z;
                        if self.eps[i] != 1.0 && epsilon != 1.0 {
                            return Err(Error::Geometry(format!(
                                "dielectric bodies overlap at ({x}, {y}, {z})"
                            )));
                        }
                        if epsilon != 1.0 {
                            self.eps[i] = epsilon;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn build_dielectric_map(
    region: &BoxRegion,
    epsilon: f64,
    shape: &LatticeShape,
) -> Result<DielectricMap> {
    if !(epsilon.is_finite() && epsilon >= 1.0) {
        return Err(Error::Geometry(format!(
            "permittivity must be finite and >= 1, got {epsilon}"
        )));
    }
    region.validate(shape)?;
    let mut map = DielectricMap::vacuum(*shape);
    map.overlay(region, epsilon)?;
    Ok(map)
}

/// One interacting body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Body {
    /// Ideal conducting plane at the given z.
    Plate { z: usize },
    Grating(GratingSpec),
    Dielectric { region: BoxRegion, epsilon: f64 },
}

impl Body {
    fn mask(&self, shape: &LatticeShape) -> Result<Option<BoundaryMask>> {
        match self {
            Body::Plate { z } => build_plate_mask(*z, shape).map(Some),
            Body::Grating(g) => g.mask(shape).map(Some),
            Body::Dielectric { .. } => Ok(None),
        }
    }
}

/// One Casimir experiment on one lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub shape: LatticeShape,
    pub params: SimulationParams,
    pub bodies: Vec<Body>,
}

impl SceneSpec {
    pub fn new(shape: LatticeShape, params: SimulationParams, bodies: Vec<Body>) -> Result<Self> {
        let scene = Self {
            shape,
            params,
            bodies,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn empty(shape: LatticeShape, params: SimulationParams) -> Self {
        Self {
            shape,
            params,
            bodies: Vec::new(),
        }
    }

    pub fn plates(shape: LatticeShape, params: SimulationParams, spec: PlatePairSpec) -> Result<Self> {
        spec.validate(&shape)?;
        Self::new(
            shape,
            params,
            vec![Body::Plate { z: spec.z_low }, Body::Plate { z: spec.z_high }],
        )
    }

    pub fn grating_pair(
        shape: LatticeShape,
        params: SimulationParams,
        bottom: GratingSpec,
        top: GratingSpec,
    ) -> Result<Self> {
        build_grating_pair_mask(&bottom, &top, &shape)?;
        Self::new(shape, params, vec![Body::Grating(bottom), Body::Grating(top)])
    }

    /// Checks every body against the lattice and against each other.
    pub fn validate(&self) -> Result<()> {
        for body in &self.bodies {
            match body {
                Body::Plate { z } => {
                    if *z >= self.shape.extent(Z) {
                        return Err(Error::Geometry(format!(
                            "plate at z={z} outside N_z={}",
                            self.shape.extent(Z)
                        )));
                    }
                }
                Body::Grating(g) => g.validate(&self.shape)?,
                Body::Dielectric { region, epsilon } => {
                    build_dielectric_map(region, *epsilon, &self.shape)?;
                }
            }
        }
        let gratings: Vec<&GratingSpec> = self
            .bodies
            .iter()
            .filter_map(|b| match b {
                Body::Grating(g) => Some(g),
                _ => None,
            })
            .collect();
        if let [a, b] = gratings[..] {
            let (up, down) = if a.orientation == Orientation::Up { (a, b) } else { (b, a) };
            let gap = grating_tip_gap(up, down, &self.shape)?;
            if gap < 1 {
                return Err(Error::Geometry(format!(
                    "gratings interpenetrate: tip separation {gap} < 1"
                )));
            }
        }
        let plates: Vec<usize> = self
            .bodies
            .iter()
            .filter_map(|b| match b {
                Body::Plate { z } => Some(*z),
                _ => None,
            })
            .collect();
        if plates.len() == 2 && plates[0] == plates[1] {
            return Err(Error::Geometry(format!(
                "two plates at the same plane z={}",
                plates[0]
            )));
        }
        self.dielectric()?;
        Ok(())
    }

    /// Union of all conductor surfaces.
    pub fn mask(&self) -> Result<BoundaryMask> {
        let mut mask = BoundaryMask::empty(self.shape);
        for body in &self.bodies {
            if let Some(m) = body.mask(&self.shape)? {
                mask = mask.union(&m)?;
            }
        }
        Ok(mask)
    }

    /// Combined permittivity, or `None` when no dielectric is present.
    pub fn dielectric(&self) -> Result<Option<DielectricMap>> {
        let mut map: Option<DielectricMap> = None;
        for body in &self.bodies {
            if let Body::Dielectric { region, epsilon } = body {
                if !(epsilon.is_finite() && *epsilon >= 1.0) {
                    return Err(Error::Geometry(format!(
                        "permittivity must be finite and >= 1, got {epsilon}"
                    )));
                }
                region.validate(&self.shape)?;
                map.get_or_insert_with(|| DielectricMap::vacuum(self.shape))
                    .overlay(region, *epsilon)?;
            }
        }
        Ok(map)
    }

    /// Content hash of the scene, used to tie checkpoints to their scene.
    pub fn fingerprint(&self) -> [u8; 32] {
        let digest = Sha256::digest(format!("{self:?}").as_bytes());
        let mut out = [0u8; 32];
        out.copy_from_slice(&digest);
        out
    }
}

/// The four scenes of the interaction subtraction:
/// both bodies, body A alone, body B alone, and the empty lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct RenormalizationScenes {
    pub full: SceneSpec,
    pub only_a: SceneSpec,
    pub only_b: SceneSpec,
    pub free: SceneSpec,
}

impl RenormalizationScenes {
    pub fn as_array(&self) -> [&SceneSpec; 4] {
        [&self.full, &self.only_a, &self.only_b, &self.free]
    }
}

pub fn renormalization_scenes(scene: &SceneSpec) -> Result<RenormalizationScenes> {
    if scene.bodies.len() != 2 {
        return Err(Error::Geometry(format!(
            "renormalization needs exactly two bodies, scene has {}",
            scene.bodies.len()
        )));
    }
    let with = |bodies: Vec<Body>| SceneSpec {
        shape: scene.shape,
        params: scene.params,
        bodies,
    };
    Ok(RenormalizationScenes {
        full: scene.clone(),
        only_a: with(vec![scene.bodies[0].clone()]),
        only_b: with(vec![scene.bodies[1].clone()]),
        free: with(Vec::new()),
    })
}
