//! SVG rendering of a plan. One user unit is one meter and the y axis points
//! up; the view box is the peers' bounding box inflated by the radio range.

use std::fmt::Write;

use crate::geom::Point;
use crate::topology::Topology;

use super::Plan;

fn flip(p: Point) -> (f64, f64) {
    (p.x, -p.y)
}

pub fn render_svg(t: &Topology, plan: &Plan) -> String {
    let r = t.radio_range();
    let (mut minx, mut miny, mut maxx, mut maxy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if !t.is_empty() {
        minx = f64::INFINITY;
        miny = f64::INFINITY;
        maxx = f64::NEG_INFINITY;
        maxy = f64::NEG_INFINITY;
        for p in t.peers() {
            minx = minx.min(p.x);
            maxx = maxx.max(p.x);
            miny = miny.min(p.y);
            maxy = maxy.max(p.y);
        }
    }
    let (vx, vy) = (minx - r, -(maxy + r));
    let (vw, vh) = (maxx - minx + 2.0 * r, maxy - miny + 2.0 * r);
    let stroke = r / 100.0;
    let dot = r / 40.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx} {vy} {vw} {vh}" font-size="{}">"#,
        r / 12.0
    );
    let _ = writeln!(
        s,
        r#"<g id="disks" fill="steelblue" fill-opacity="0.08" stroke="steelblue" stroke-width="{stroke}">"#
    );
    for d in &plan.disks {
        let (cx, cy) = flip(d.center);
        let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="{}"/>"#, d.radius);
    }
    s.push_str("</g>\n");

    let _ = writeln!(s, r#"<g id="edges" stroke="gray" stroke-width="{stroke}">"#);
    for e in plan.graph.edges() {
        let (x1, y1) = flip(t.position(e.lo));
        let (x2, y2) = flip(t.position(e.hi));
        let up = plan.unsafe_pairs.contains(e);
        let extra = if up { r#" stroke="crimson" class="up""# } else { "" };
        let _ = writeln!(s, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"{extra}/>"#);
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"peers\">\n");
    for p in t.peers() {
        let (cx, cy) = flip(p.position());
        let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="{dot}" fill="black"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, cx + dot, cy - dot, escape(&p.id));
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"witnesses\" fill=\"darkorange\">\n");
    for h in plan.orphanages.iter() {
        let (cx, cy) = flip(h.witness);
        let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="{}"/>"#, dot / 2.0);
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"altruists\" fill=\"forestgreen\">\n");
    for a in &plan.placement.altruists {
        let (cx, cy) = flip(a.position);
        let h = dot * 1.5;
        let _ = writeln!(
            s,
            r#"<rect class="altruist" x="{}" y="{}" width="{}" height="{}"/>"#,
            cx - h,
            cy - h,
            2.0 * h,
            2.0 * h
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{plan, SolverKind};
    use crate::fixtures;
    use crate::unsafe_pairs::PsmMode;

    #[test]
    fn faces_svg_has_disks_altruist_and_flipped_axis() {
        let t = fixtures::faces();
        let p = plan(&t, PsmMode::NoPsm, SolverKind::Exact).unwrap();
        let svg = render_svg(&t, &p);
        assert_eq!(svg.matches("class=\"altruist\"").count(), 1);
        assert_eq!(svg.matches("class=\"up\"").count(), 3);
        assert_eq!(svg.matches(r#"r="10"/>"#).count(), 3);
        // k sits at y = 7, drawn at -7
        assert!(svg.contains(r#"cx="4" cy="-7""#));
    }

    #[test]
    fn empty_overlay_without_unsafe_pairs() {
        let t = fixtures::two_isolated_edges();
        let p = plan(&t, PsmMode::NoPsm, SolverKind::Exact).unwrap();
        let svg = render_svg(&t, &p);
        assert!(!svg.contains("altruist\""));
        assert!(svg.starts_with("<svg"));
    }
}
