//! SVG renderings for the demo page: Knuth diagrams of comparator networks
//! and the bipartite subsumption graph.

use std::fmt::Write;

use sortnet_core::matching::BipartiteGraph;
use sortnet_core::network::ComparatorNetwork;
use sortnet_core::subsumption::Permutation;

const CHANNEL_GAP: usize = 26;
const COLUMN_GAP: usize = 30;
const MARGIN_X: usize = 46;
const MARGIN_Y: usize = 22;

/// Draws the network as a Knuth diagram: one horizontal line per channel,
/// one dotted vertical segment per comparator. Comparators whose channel
/// ranges overlap get separate columns, preserving left-to-right order.
pub fn knuth_diagram(net: &ComparatorNetwork) -> String {
    let n = net.channels();
    let mut next_col = vec![0usize; n];
    let mut columns = Vec::with_capacity(net.size());
    let mut column_count = 1;
    for c in net.comparators() {
        let col = (c.low()..=c.high()).map(|ch| next_col[ch]).max().unwrap();
        for slot in &mut next_col[c.low()..=c.high()] {
            *slot = col + 1;
        }
        columns.push(col);
        column_count = column_count.max(col + 1);
    }

    let width = 2 * MARGIN_X + column_count.saturating_sub(1) * COLUMN_GAP;
    let height = 2 * MARGIN_Y + (n - 1) * CHANNEL_GAP;
    let y = |ch: usize| MARGIN_Y + ch * CHANNEL_GAP;
    let x = |col: usize| MARGIN_X + col * COLUMN_GAP;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\" \
         width=\"{width}\" height=\"{height}\">"
    );
    for ch in 0..n {
        let _ = write!(
            svg,
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#888\"/>\
             <text x=\"{lx}\" y=\"{ty}\" font-size=\"11\" fill=\"#555\" \
             text-anchor=\"end\">{ch}</text>",
            x0 = MARGIN_X / 2,
            x1 = width - MARGIN_X / 2,
            y = y(ch),
            lx = MARGIN_X / 2 - 5,
            ty = y(ch) + 4,
        );
    }
    for (c, &col) in net.comparators().iter().zip(&columns) {
        let cx = x(col);
        let y0 = y(c.low());
        let y1 = y(c.high());
        let _ = write!(
            svg,
            "<line x1=\"{cx}\" y1=\"{y0}\" x2=\"{cx}\" y2=\"{y1}\" \
             stroke=\"#1f6feb\" stroke-width=\"2\"/>\
             <circle cx=\"{cx}\" cy=\"{y0}\" r=\"3.5\" fill=\"#1f6feb\"/>\
             <circle cx=\"{cx}\" cy=\"{y1}\" r=\"3.5\" fill=\"#1f6feb\"/>"
        );
    }
    svg.push_str("</svg>");
    svg
}

/// Draws the subsumption graph with the A side on top and the B side below.
/// Edges pruned by the equal-cluster-size strengthening are dashed; witness
/// edges are highlighted.
pub fn subsumption_graph(
    basic: &BipartiteGraph,
    strengthened: &BipartiteGraph,
    witness: Option<&Permutation>,
) -> String {
    let n = basic.side_len();
    let gap = 52usize;
    let width = 2 * MARGIN_X + n.saturating_sub(1) * gap;
    let (top, bottom) = (30usize, 132usize);
    let x = |i: usize| MARGIN_X + i * gap;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} 162\" \
         width=\"{width}\" height=\"162\">"
    );
    for (i, j) in basic.edges() {
        let on_witness = witness.map(|w| w.map()[i] == j).unwrap_or(false);
        let (stroke, sw) = if on_witness {
            ("#d29922", "2.5")
        } else if strengthened.has_edge(i, j) {
            ("#777", "1.4")
        } else {
            ("#ccc", "1.0")
        };
        let dash = if strengthened.has_edge(i, j) {
            ""
        } else {
            " stroke-dasharray=\"4 3\""
        };
        let _ = write!(
            svg,
            "<line x1=\"{x0}\" y1=\"{top}\" x2=\"{x1}\" y2=\"{bottom}\" \
             stroke=\"{stroke}\" stroke-width=\"{sw}\"{dash}/>",
            x0 = x(i),
            x1 = x(j),
        );
    }
    for i in 0..n {
        for (cy, label_dy) in [(top, -14i32), (bottom, 22)] {
            let _ = write!(
                svg,
                "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"9\" fill=\"#eee\" stroke=\"#555\"/>\
                 <text x=\"{cx}\" y=\"{ly}\" font-size=\"11\" fill=\"#333\" \
                 text-anchor=\"middle\">{i}</text>\
                 <text x=\"{cx}\" y=\"{ty}\" font-size=\"10\" fill=\"#888\" \
                 text-anchor=\"middle\">{side}</text>",
                cx = x(i),
                ly = cy + 4,
                ty = (cy as i32 + label_dy),
                side = if cy == top { "a" } else { "b" },
            );
        }
    }
    svg.push_str("</svg>");
    svg
}
