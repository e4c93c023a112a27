//! Binary STL, little-endian: 80-byte header, `u32` triangle count, then per
//! triangle a normal and three vertices as `f32` triples plus a zero `u16`.

use std::io::{Read, Write};

use super::GeometryError;
use crate::mesh::TriMesh;

const HEADER: &[u8] = b"oritube binary STL, units mm";

/// Size in bytes of a binary STL holding `n` triangles.
pub const fn stl_size(n: usize) -> usize {
    80 + 4 + 50 * n
}

/// One triangle as stored in the file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StlTriangle {
    pub normal: [f32; 3],
    pub vertices: [[f32; 3]; 3],
}

/// Writes `mesh` and returns the number of bytes written.
pub fn export_stl<W: Write>(mesh: &TriMesh, out: &mut W) -> Result<usize, GeometryError> {
    if mesh.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    let mut buf = Vec::with_capacity(stl_size(mesh.triangles.len()));
    buf.extend_from_slice(HEADER);
    buf.resize(80, 0);
    let count = u32::try_from(mesh.triangles.len())
        .map_err(|_| GeometryError::DegenerateSpec("too many triangles for STL".into()))?;
    buf.extend_from_slice(&count.to_le_bytes());
    for i in 0..mesh.triangles.len() {
        let n = mesh.normal(i);
        for c in n.iter() {
            buf.extend_from_slice(&(*c as f32).to_le_bytes());
        }
        for v in mesh.triangle(i) {
            for c in v.iter() {
                buf.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        buf.extend_from_slice(&0u16.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(buf.len())
}

pub fn read_stl<R: Read>(input: &mut R) -> Result<Vec<StlTriangle>, GeometryError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let bad =
        |msg: &str| GeometryError::IoFailure(std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string()));
    if bytes.len() < 84 {
        return Err(bad("file shorter than STL header"));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    if bytes.len() != stl_size(count) {
        return Err(bad("byte count does not match triangle count"));
    }
    let f = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    Ok((0..count)
        .map(|t| {
            let base = 84 + 50 * t;
            let triple = |o: usize| [f(base + o), f(base + o + 4), f(base + o + 8)];
            StlTriangle { normal: triple(0), vertices: [triple(12), triple(24), triple(36)] }
        })
        .collect())
}

/// Welds an STL triangle soup back into an indexed mesh by exact coordinate
/// match.
pub fn weld(triangles: &[StlTriangle]) -> TriMesh {
    let mut index = std::collections::HashMap::new();
    let mut mesh = TriMesh::default();
    for t in triangles {
        let mut tri = [0usize; 3];
        for (k, v) in t.vertices.iter().enumerate() {
            let key = v.map(f32::to_bits);
            tri[k] = *index.entry(key).or_insert_with(|| {
                mesh.vertices.push(crate::Vec3::new(v[0] as f64, v[1] as f64, v[2] as f64));
                mesh.vertices.len() - 1
            });
        }
        mesh.triangles.push(tri);
    }
    mesh
}
