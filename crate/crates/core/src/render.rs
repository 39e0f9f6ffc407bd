//! SVG drawing of two-dimensional collections.
//!
//! Grid collections are drawn as one square per filled cell, archives as one
//! dot per member. Colour encodes fitness on a ramp running from dark (worst
//! in the collection) to light (best).

use std::fmt::Write;

use crate::container::{AnyContainer, Container};
use crate::error::QdError;

const MARGIN: f64 = 10.0;
const PLOT: f64 = 500.0;
const LEGEND_TOP: f64 = MARGIN + PLOT + 15.0;
const LEGEND_HEIGHT: f64 = 12.0;
const WIDTH: f64 = PLOT + 2.0 * MARGIN;
const HEIGHT: f64 = LEGEND_TOP + LEGEND_HEIGHT + 25.0;
const DOT_RADIUS: f64 = 2.5;

/// Anchors of a dark-to-light ramp with monotone lightness.
const RAMP: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

/// Colour for `t` in `[0, 1]`, where 1 is the lightest.
pub fn ramp_color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let pos = t * (RAMP.len() - 1) as f64;
    let i = (pos.floor() as usize).min(RAMP.len() - 2);
    let f = pos - i as f64;
    let c: Vec<u8> = (0..3)
        .map(|k| (RAMP[i][k] + f * (RAMP[i + 1][k] - RAMP[i][k])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn to_x(u: f64) -> f64 {
    MARGIN + u * PLOT
}

fn to_y(v: f64) -> f64 {
    MARGIN + (1.0 - v) * PLOT
}

pub fn render_collection_svg(container: &AnyContainer) -> Result<String, QdError> {
    let dim = container.descriptor_dim();
    if dim != 2 {
        return Err(QdError::RenderDimension(dim));
    }
    let members = container.members();
    let lo = members.iter().map(|m| m.fitness()).reduce(f64::min);
    let hi = members.iter().map(|m| m.fitness()).reduce(f64::max);
    let shade = |fitness: f64| match (lo, hi) {
        (Some(lo), Some(hi)) if hi > lo => ramp_color((fitness - lo) / (hi - lo)),
        _ => ramp_color(1.0),
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="#ffffff" stroke="#333333"/>"##
    );
    match container {
        AnyContainer::Grid(grid) => {
            let res = &grid.config().resolution;
            let (w, h) = (PLOT / res[0] as f64, PLOT / res[1] as f64);
            for m in members {
                let cell = grid.cell_of(m.descriptor().coords());
                let x = MARGIN + cell[0] as f64 * w;
                let y = MARGIN + PLOT - (cell[1] + 1) as f64 * h;
                let _ = writeln!(
                    svg,
                    r#"<rect x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="{}"/>"#,
                    shade(m.fitness())
                );
            }
        }
        AnyContainer::Archive(_) => {
            for m in members {
                let c = m.descriptor().coords();
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.3}" cy="{:.3}" r="{DOT_RADIUS}" fill="{}"/>"#,
                    to_x(c[0]),
                    to_y(c[1]),
                    shade(m.fitness())
                );
            }
        }
    }

    let _ = writeln!(
        svg,
        r#"<defs><linearGradient id="ramp" x1="0" x2="1" y1="0" y2="0">"#
    );
    for i in 0..RAMP.len() {
        let t = i as f64 / (RAMP.len() - 1) as f64;
        let _ = writeln!(
            svg,
            r#"<stop offset="{t}" stop-color="{}"/>"#,
            ramp_color(t)
        );
    }
    let _ = writeln!(svg, "</linearGradient></defs>");
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{LEGEND_TOP}" width="{PLOT}" height="{LEGEND_HEIGHT}" fill="url(#ramp)" stroke="#333333"/>"##
    );
    let label = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
    let text_y = LEGEND_TOP + LEGEND_HEIGHT + 15.0;
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{text_y}" font-family="sans-serif" font-size="12">fitness {}</text>"#,
        label(lo)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{text_y}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
        MARGIN + PLOT,
        label(hi)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ArchiveConfig, GridConfig};
    use crate::container::{ArchiveContainer, GridContainer};
    use crate::types::{Descriptor, Encoding, Genotype, Individual};

    fn ind(id: u64, coords: &[f64], fitness: f64) -> Individual {
        Individual::new(
            id,
            None,
            Genotype::new(vec![], Encoding::Continuous).unwrap(),
            Descriptor::new(coords.to_vec()),
            fitness,
        )
    }

    fn archive(dim: usize) -> AnyContainer {
        AnyContainer::Archive(ArchiveContainer::new(
            ArchiveConfig {
                l: 0.01,
                epsilon: 0.1,
                k_nn: 15,
            },
            dim,
            1.0,
        ))
    }

    fn lightness(hex: &str) -> f64 {
        let c: Vec<f64> = (0..3)
            .map(|i| u8::from_str_radix(&hex[1 + 2 * i..3 + 2 * i], 16).unwrap() as f64)
            .collect();
        0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2]
    }

    #[test]
    fn ramp_gets_lighter() {
        let l: Vec<f64> = (0..=20).map(|i| lightness(&ramp_color(i as f64 / 20.0))).collect();
        assert!(l.windows(2).all(|w| w[0] < w[1]), "{l:?}");
    }

    #[test]
    fn empty_collection_draws_legend_only() {
        let svg = render_collection_svg(&archive(2)).unwrap();
        assert!(svg.contains("url(#ramp)"));
        assert!(!svg.contains("<circle"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn single_member_sits_at_canvas_centre() {
        let mut a = archive(2);
        a.add(ind(0, &[0.5, 0.5], -0.1)).unwrap();
        let svg = render_collection_svg(&a).unwrap();
        assert!(svg.contains(r#"<circle cx="260.000" cy="260.000""#), "{svg}");
    }

    #[test]
    fn grid_cells_flip_vertically() {
        let mut g = AnyContainer::Grid(GridContainer::new(GridConfig {
            resolution: vec![10, 10],
            subgrid_depth: 1,
        }));
        g.add(ind(0, &[0.05, 0.95], -1.0)).unwrap();
        g.add(ind(1, &[0.95, 0.05], 0.0)).unwrap();
        let svg = render_collection_svg(&g).unwrap();
        assert!(svg.contains(&format!(r#"<rect x="10.000" y="10.000" width="50.000" height="50.000" fill="{}"/>"#, ramp_color(0.0))));
        assert!(svg.contains(&format!(r#"<rect x="460.000" y="460.000" width="50.000" height="50.000" fill="{}"/>"#, ramp_color(1.0))));
    }

    #[test]
    fn refuses_other_dimensions() {
        assert_eq!(render_collection_svg(&archive(6)), Err(QdError::RenderDimension(6)));
    }
}
