//! SVG rendering: regions as colored cells, gates as thick strokes, walls,
//! landmark markers, and an optional route polyline.

use gridroute::decomp::Decomposition;
use gridroute::grid::{NodeId, Orientation};
use gridroute::landmarks::LandmarkGraph;

const SCALE: f64 = 14.0;
const PALETTE: [&str; 10] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    "#d9d9d9", "#bc80bd",
];

pub fn render(d: &Decomposition, lg: &LandmarkGraph, route: Option<&[NodeId]>) -> String {
    let g = &d.base;
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
    for v in g.alive_ids() {
        let p = g.pos(v);
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let width = (max_x - min_x + 2) as f64 * SCALE;
    let height = (max_y - min_y + 2) as f64 * SCALE;
    // y grows north; svg grows down.
    let tx = |x: i32| (x - min_x + 1) as f64 * SCALE;
    let ty = |y: i32| height - (y - min_y + 1) as f64 * SCALE;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Region fills: one square per node, colored by its smallest region.
    for v in g.alive_ids() {
        let regions = d.regions_of_original(v);
        let color = regions.first().map_or("#eeeeee", |&r| PALETTE[r % PALETTE.len()]);
        let p = g.pos(v);
        out.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"{}\" fill-opacity=\"0.55\"/>\n",
            tx(p.x) - SCALE * 0.5,
            ty(p.y) - SCALE * 0.5,
            SCALE,
            SCALE,
            color
        ));
    }

    // Grid edges.
    for v in g.alive_ids() {
        let p = g.pos(v);
        for w in g.neighbors(v) {
            if w < v {
                continue;
            }
            let q = g.pos(w);
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#999\" stroke-width=\"1\"/>\n",
                tx(p.x), ty(p.y), tx(q.x), ty(q.y)
            ));
        }
    }

    // Walls: boundary nodes that are not gate nodes, drawn as dark dots.
    for region in &d.regions {
        for wall in &region.walls {
            for &vn in &wall.nodes {
                let p = d.graph.pos(vn);
                out.push_str(&format!(
                    "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"1.6\" fill=\"#444\"/>\n",
                    tx(p.x), ty(p.y)
                ));
            }
        }
    }

    // Gates: thick strokes along their runs (dots for point gates).
    for gate in &d.gates {
        let first = gate.positions.first().unwrap();
        let last = gate.positions.last().unwrap();
        if gate.positions.len() == 1 {
            out.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"2\"/>\n",
                tx(first.x), ty(first.y)
            ));
        } else {
            let color = match gate.orientation {
                Orientation::Vertical => "#1f4e99",
                Orientation::Horizontal => "#1f7899",
            };
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" stroke-width=\"4\" stroke-linecap=\"round\" stroke-opacity=\"0.8\"/>\n",
                tx(first.x), ty(first.y), tx(last.x), ty(last.y), color
            ));
        }
    }

    // Landmarks.
    for l in &lg.landmarks {
        out.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3.2\" fill=\"#d62728\"/>\n",
            tx(l.pos.x), ty(l.pos.y)
        ));
    }

    // Route polyline.
    if let Some(route) = route {
        let pts: Vec<String> = route
            .iter()
            .map(|&v| {
                let p = g.pos(v);
                format!("{:.1},{:.1}", tx(p.x), ty(p.y))
            })
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2.5\"/>\n",
            pts.join(" ")
        ));
    }

    out.push_str("</svg>\n");
    out
}
