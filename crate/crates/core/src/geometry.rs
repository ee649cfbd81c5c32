//! Pincell geometry: concentric infinite cylinders inside a square cell with
//! reflective faces.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// Distance a particle is pushed past a surface after crossing it, cm.
pub const NUDGE: f64 = 1.0e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    XMin,
    XMax,
    YMin,
    YMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surface {
    /// Index into the radii list.
    Cylinder(usize),
    Face(Face),
}

/// Result of a boundary search. `surface` is `None` for a purely axial
/// direction, in which case `distance` is infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub distance: f64,
    pub surface: Option<Surface>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("position ({x}, {y}, {z}) lies outside the cell")]
    Outside { x: f64, y: f64, z: f64 },
    #[error("invalid pincell: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pincell {
    pitch: f64,
    radii: Vec<f64>,
    radii_sq: Vec<f64>,
    region_materials: Vec<usize>,
}

impl Pincell {
    /// `region_materials` lists one material per region, innermost first,
    /// and must have one more entry than `radii`.
    pub fn new(
        pitch: f64,
        radii: Vec<f64>,
        region_materials: Vec<usize>,
    ) -> Result<Self, GeometryError> {
        let invalid = |m: String| Err(GeometryError::Invalid(m));
        if !(pitch > 0.0 && pitch.is_finite()) {
            return invalid(format!("pitch must be positive, got {pitch}"));
        }
        if radii.first().is_some_and(|&r| !(r > 0.0)) {
            return invalid("radii must be positive".into());
        }
        if !radii.windows(2).all(|w| w[0] < w[1]) {
            return invalid("radii must be strictly increasing".into());
        }
        if radii.last().is_some_and(|&r| !(r < pitch / 2.0)) {
            return invalid("outermost cylinder must fit inside the cell".into());
        }
        if region_materials.len() != radii.len() + 1 {
            return invalid(format!(
                "{} radii need {} region materials, got {}",
                radii.len(),
                radii.len() + 1,
                region_materials.len()
            ));
        }
        let radii_sq = radii.iter().map(|r| r * r).collect();
        Ok(Pincell {
            pitch,
            radii,
            radii_sq,
            region_materials,
        })
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn half_pitch(&self) -> f64 {
        self.pitch / 2.0
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn region_materials(&self) -> &[usize] {
        &self.region_materials
    }

    pub fn num_regions(&self) -> usize {
        self.region_materials.len()
    }

    pub fn material(&self, region: usize) -> usize {
        self.region_materials[region]
    }

    pub fn contains(&self, p: Vec3) -> bool {
        let h = self.half_pitch();
        p.x.abs() <= h && p.y.abs() <= h
    }

    /// Region index of `p`; region `i` spans `[r_i, r_{i+1})` radially.
    pub fn locate(&self, p: Vec3) -> Result<usize, GeometryError> {
        if !self.contains(p) {
            return Err(GeometryError::Outside {
                x: p.x,
                y: p.y,
                z: p.z,
            });
        }
        let r_sq = p.x * p.x + p.y * p.y;
        Ok(self.radii_sq.partition_point(|&rs| rs <= r_sq))
    }

    pub fn distance_to_boundary(&self, p: Vec3, dir: Vec3) -> Result<Boundary, GeometryError> {
        let region = self.locate(p)?;
        Ok(self.distance_in_region(p, dir, region))
    }

    /// Nearest surface along `dir` for a particle known to be in `region`.
    /// Ties go to the cylinder, and the inner cylinder wins over the outer.
    pub fn distance_in_region(&self, p: Vec3, dir: Vec3, region: usize) -> Boundary {
        let mut best = Boundary {
            distance: f64::INFINITY,
            surface: None,
        };
        let a = dir.x * dir.x + dir.y * dir.y;
        if a > 0.0 {
            let b = p.x * dir.x + p.y * dir.y;
            let c0 = p.x * p.x + p.y * p.y;
            // inner cylinder, approached from outside: only when moving inwards
            if region > 0 && b < 0.0 {
                let disc = b * b - a * (c0 - self.radii_sq[region - 1]);
                if disc > 0.0 {
                    let d = (-b - disc.sqrt()) / a;
                    if d > 0.0 {
                        best = Boundary {
                            distance: d,
                            surface: Some(Surface::Cylinder(region - 1)),
                        };
                    }
                }
            }
            // outer cylinder, seen from inside: always hit
            if best.surface.is_none() && region < self.radii.len() {
                let disc = (b * b - a * (c0 - self.radii_sq[region])).max(0.0);
                let d = ((-b + disc.sqrt()) / a).max(0.0);
                best = Boundary {
                    distance: d,
                    surface: Some(Surface::Cylinder(region)),
                };
            }
        }
        let h = self.half_pitch();
        let mut face = |d: f64, f: Face| {
            let d = d.max(0.0);
            if d < best.distance {
                best = Boundary {
                    distance: d,
                    surface: Some(Surface::Face(f)),
                };
            }
        };
        if dir.x > 0.0 {
            face((h - p.x) / dir.x, Face::XMax);
        } else if dir.x < 0.0 {
            face((-h - p.x) / dir.x, Face::XMin);
        }
        if dir.y > 0.0 {
            face((h - p.y) / dir.y, Face::YMax);
        } else if dir.y < 0.0 {
            face((-h - p.y) / dir.y, Face::YMin);
        }
        best
    }

    /// Snaps `p` onto `face` exactly, so round-off can never leave it outside.
    pub fn snap_to_face(&self, p: Vec3, face: Face) -> Vec3 {
        let h = self.half_pitch();
        match face {
            Face::XMin => Vec3 { x: -h, ..p },
            Face::XMax => Vec3 { x: h, ..p },
            Face::YMin => Vec3 { y: -h, ..p },
            Face::YMax => Vec3 { y: h, ..p },
        }
    }
}

impl Pincell {
    /// Mirrors any coordinate that has strayed past a face back inside,
    /// flipping the matching direction component. Handles corner hits,
    /// where the nudge after one reflection crosses the other face.
    pub fn fold_into_cell(&self, mut p: Vec3, mut dir: Vec3) -> (Vec3, Vec3) {
        let h = self.half_pitch();
        if p.x > h {
            p.x = 2.0 * h - p.x;
            dir.x = -dir.x.abs();
        } else if p.x < -h {
            p.x = -2.0 * h - p.x;
            dir.x = dir.x.abs();
        }
        if p.y > h {
            p.y = 2.0 * h - p.y;
            dir.y = -dir.y.abs();
        } else if p.y < -h {
            p.y = -2.0 * h - p.y;
            dir.y = dir.y.abs();
        }
        (p, dir)
    }
}

/// Specular reflection off a cell face.
pub fn reflect(dir: Vec3, face: Face) -> Vec3 {
    match face {
        Face::XMin | Face::XMax => Vec3 { x: -dir.x, ..dir },
        Face::YMin | Face::YMax => Vec3 { y: -dir.y, ..dir },
    }
}
