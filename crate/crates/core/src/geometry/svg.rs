//! SVG 1.1 export of crease patterns, mm units.

use std::fmt::Write as _;
use std::io::Write;

use super::{CreaseKind, CreasePattern2D, GeometryError};

const STYLE: &str = ".mountain{stroke:#c0392b;stroke-width:0.3}\
.valley{stroke:#2c6fbb;stroke-width:0.3;stroke-dasharray:1.5,1}\
.boundary{stroke:#000;stroke-width:0.4}";

/// Writes the pattern as SVG and returns the byte count. The y axis is
/// flipped so the pattern reads the same way up as its coordinates.
pub fn export_svg_pattern<W: Write>(pattern: &CreasePattern2D, out: &mut W) -> Result<usize, GeometryError> {
    let (lo, hi) = match pattern.bounding_box() {
        Some(bb) if !pattern.is_empty() => bb,
        _ => return Err(GeometryError::EmptyMesh),
    };
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.6}mm" height="{h:.6}mm" viewBox="{:.6} {:.6} {w:.6} {h:.6}">"#,
        lo.x, -hi.y
    );
    let _ = writeln!(s, "<style>{STYLE}</style>");
    for e in &pattern.edges {
        let (a, b) = (pattern.vertices[e.a], pattern.vertices[e.b]);
        let fold = match e.cut_from {
            Some(k) if k != CreaseKind::Boundary => format!(r#" data-fold="{}""#, k.as_str()),
            _ => String::new(),
        };
        let _ = writeln!(
            s,
            r#"<line class="{}" x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}"{fold}/>"#,
            e.kind.as_str(),
            a.x,
            -a.y,
            b.x,
            -b.y
        );
    }
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes())?;
    Ok(s.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_tube, make_quad_section, unroll_crease_pattern, TubeSpec};

    fn square_pattern() -> CreasePattern2D {
        let cs = make_quad_section(15.0, 15.0, 0.0, 90.0).unwrap();
        let t = generate_tube(&TubeSpec::new(cs, 45.0, 15.0, 1)).unwrap();
        unroll_crease_pattern(&t).unwrap()
    }

    #[test]
    fn line_classes_match_pattern() {
        let p = square_pattern();
        let mut buf = Vec::new();
        let n = export_svg_pattern(&p, &mut buf).unwrap();
        assert_eq!(n, buf.len());
        let text = String::from_utf8(buf).unwrap();
        let lines = text.matches("<line ").count();
        let boundary = text.matches(r#"class="boundary""#).count();
        assert_eq!(lines, p.edges.len());
        assert_eq!(lines - boundary, p.fold_lines().count());
        assert!(text.contains(r#"class="valley""#) || text.contains(r#"class="mountain""#));
    }

    #[test]
    fn view_box_is_bounding_box() {
        let p = square_pattern();
        let (lo, hi) = p.bounding_box().unwrap();
        let mut buf = Vec::new();
        export_svg_pattern(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let vb = format!("viewBox=\"{:.6} {:.6} {:.6} {:.6}\"", lo.x, -hi.y, hi.x - lo.x, hi.y - lo.y);
        assert!(text.contains(&vb));
    }

    #[test]
    fn empty_pattern_rejected() {
        let p = CreasePattern2D { vertices: vec![], source: vec![], panels: vec![], edges: vec![], rows: 0, cols: 0 };
        assert!(matches!(export_svg_pattern(&p, &mut Vec::new()), Err(GeometryError::EmptyMesh)));
    }

    #[test]
    fn deterministic() {
        let p = square_pattern();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        export_svg_pattern(&p, &mut a).unwrap();
        export_svg_pattern(&p, &mut b).unwrap();
        assert_eq!(a, b);
    }
}
