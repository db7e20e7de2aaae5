//! Non-significance cliques and critical difference diagram rendering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rule used to connect method pairs when forming cliques.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliqueSource {
    /// Pairs closer than the critical difference are connected.
    #[serde(rename = "cd")]
    CriticalDifference,
    /// Pairs not rejected by Wilcoxon-Holm are connected.
    #[serde(rename = "holm")]
    Holm,
}

/// Maximal groups of methods that are not significantly different, plus the
/// integer axis bounds for the diagram.
///
/// Each clique has at least two members, members are sorted, no clique is a
/// subset of another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueSet {
    pub cliques: Vec<Vec<usize>>,
    pub axis_min: f64,
    pub axis_max: f64,
}

impl CliqueSet {
    /// One clique containing every method (the omnibus-test-not-rejected case).
    pub fn single_clique(scores: &[f64]) -> Self {
        let (axis_min, axis_max) = axis_bounds(scores);
        CliqueSet {
            cliques: vec![(0..scores.len()).collect()],
            axis_min,
            axis_max,
        }
    }
}

fn axis_bounds(scores: &[f64]) -> (f64, f64) {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min.floor(), max.ceil())
}

fn normalize(mut cliques: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in &mut cliques {
        c.sort_unstable();
    }
    cliques.sort();
    cliques
}

/// Cliques of the graph connecting pairs with |score_a - score_b| < cd.
///
/// The graph is an interval graph on the sorted scores, so the maximal
/// cliques are exactly the maximal sorted windows whose extremes differ by
/// less than cd.
pub fn cliques_from_threshold(scores: &[f64], cd: f64) -> CliqueSet {
    let (axis_min, axis_max) = axis_bounds(scores);
    let k = scores.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut cliques = Vec::new();
    let mut j = 0;
    for i in 0..k {
        if j < i + 1 {
            j = i + 1;
        }
        while j < k && scores[order[j]] - scores[order[i]] < cd {
            j += 1;
        }
        // Window [i, j); maximal iff it cannot extend left.
        let extends_left = i > 0 && scores[order[j - 1]] - scores[order[i - 1]] < cd;
        if j - i >= 2 && !extends_left {
            cliques.push(order[i..j].to_vec());
        }
    }
    CliqueSet {
        cliques: normalize(cliques),
        axis_min,
        axis_max,
    }
}

/// Maximal cliques of the non-rejection graph given a symmetric pairwise
/// rejection matrix (Bron-Kerbosch; k <= 20 keeps this exhaustive search
/// cheap). `scores` only provides the axis bounds.
pub fn cliques_from_pairs(rejected: &[Vec<bool>], scores: &[f64]) -> CliqueSet {
    let k = scores.len();
    debug_assert_eq!(rejected.len(), k);
    let mut adjacency = vec![0u32; k];
    for (a, row) in rejected.iter().enumerate() {
        for (b, &rej) in row.iter().enumerate() {
            if a != b && !rej {
                adjacency[a] |= 1 << b;
            }
        }
    }

    let mut found: Vec<u32> = Vec::new();
    bron_kerbosch(0, (1u32 << k) - 1, 0, &adjacency, &mut found);

    let (axis_min, axis_max) = axis_bounds(scores);
    let cliques = found
        .into_iter()
        .filter(|c| c.count_ones() >= 2)
        .map(|c| (0..k).filter(|&i| c & (1 << i) != 0).collect())
        .collect();
    CliqueSet {
        cliques: normalize(cliques),
        axis_min,
        axis_max,
    }
}

fn bron_kerbosch(r: u32, mut p: u32, mut x: u32, adj: &[u32], out: &mut Vec<u32>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    while p != 0 {
        let v = p.trailing_zeros() as usize;
        let bit = 1u32 << v;
        bron_kerbosch(r | bit, p & adj[v], x & adj[v], adj, out);
        p &= !bit;
        x |= bit;
    }
}

/// Rendering options for [`render_cd_diagram`]. Dimensions must be >= 100 px.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramOptions {
    pub width_px: u32,
    pub height_px: u32,
    pub title: String,
    pub show_cd_ruler: bool,
    pub score_label: String,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        DiagramOptions {
            width_px: 800,
            height_px: 360,
            title: String::new(),
            show_cd_ruler: true,
            score_label: "score".into(),
        }
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Render a critical difference diagram as a standalone SVG 1.1 document.
///
/// Smaller (better) scores sit on the left. The axis spans
/// [floor(min score), ceil(max score)] with integer ticks; each clique is one
/// thick bar under the axis; the better half of the methods is labelled in a
/// left column, the rest in a right column. Output is deterministic for
/// fixed inputs.
pub fn render_cd_diagram(
    scores: &[f64],
    names: &[String],
    cliques: &CliqueSet,
    cd: f64,
    options: &DiagramOptions,
) -> Result<String> {
    if options.width_px < 100 || options.height_px < 100 {
        return Err(Error::Domain(format!(
            "diagram dimensions must be at least 100 px, got {}x{}",
            options.width_px, options.height_px
        )));
    }
    if scores.len() != names.len() || scores.is_empty() {
        return Err(Error::Domain(
            "scores and names must be non-empty and of equal length".into(),
        ));
    }

    let k = scores.len();
    let w = options.width_px as f64;
    let degenerate = cliques.axis_min == cliques.axis_max;

    let margin = 110.0;
    let x0 = margin;
    let x1 = w - margin;
    let x_of = |s: f64| -> f64 {
        if degenerate {
            (x0 + x1) / 2.0
        } else {
            x0 + (s - cliques.axis_min) / (cliques.axis_max - cliques.axis_min) * (x1 - x0)
        }
    };

    let title_h = if options.title.is_empty() { 0.0 } else { 22.0 };
    let ruler_h = if options.show_cd_ruler { 26.0 } else { 0.0 };
    let axis_y = 16.0 + title_h + ruler_h + 14.0;

    let mut svg = String::new();
    svg.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif">"#,
        options.width_px, options.height_px
    ));
    svg.push('\n');

    if !options.title.is_empty() {
        svg.push_str(&format!(
            r#"<text class="title" x="{}" y="20" text-anchor="middle" font-size="15">{}</text>"#,
            px(w / 2.0),
            xml_escape(&options.title)
        ));
        svg.push('\n');
    }

    // CD ruler above the axis, anchored at the left end.
    if options.show_cd_ruler && cd > 0.0 && !degenerate {
        let y = 16.0 + title_h + 6.0;
        let span = (x1 - x0) * cd / (cliques.axis_max - cliques.axis_min);
        let end = (x0 + span).min(x1);
        svg.push_str(&format!(
            r#"<line class="cd-ruler" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
            px(x0),
            px(y),
            px(end),
            px(y)
        ));
        for &cap in &[x0, end] {
            svg.push_str(&format!(
                r#"<line class="cd-ruler-cap" x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black" stroke-width="1"/>"#,
                px(cap),
                px(y - 3.0),
                px(y + 3.0)
            ));
        }
        svg.push_str(&format!(
            r#"<text class="cd-label" x="{}" y="{}" text-anchor="start" font-size="11">CD = {}</text>"#,
            px(end + 6.0),
            px(y + 4.0),
            cd
        ));
        svg.push('\n');
    }

    // Axis with integer ticks.
    svg.push_str(&format!(
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1.5"/>"#,
        px(x0),
        px(axis_y),
        px(x1),
        px(axis_y)
    ));
    svg.push('\n');
    let tick_lo = cliques.axis_min as i64;
    let tick_hi = cliques.axis_max as i64;
    for t in tick_lo..=tick_hi {
        let x = x_of(t as f64);
        svg.push_str(&format!(
            r#"<line class="tick" x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black" stroke-width="1"/>"#,
            px(x),
            px(axis_y - 4.0),
            px(axis_y + 4.0)
        ));
        svg.push_str(&format!(
            r#"<text class="tick-label" x="{}" y="{}" text-anchor="middle" font-size="11">{}</text>"#,
            px(x),
            px(axis_y - 8.0),
            t
        ));
        svg.push('\n');
    }
    svg.push_str(&format!(
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="start" font-size="11">{}</text>"#,
        px(x1 + 8.0),
        px(axis_y + 4.0),
        xml_escape(&options.score_label)
    ));
    svg.push('\n');

    // Clique bars, stacked on overlap.
    let mut bar_levels: Vec<(f64, usize)> = Vec::new(); // (right end, level)
    let mut n_levels = 0usize;
    if !degenerate {
        let mut bars: Vec<(f64, f64)> = cliques
            .cliques
            .iter()
            .map(|c| {
                let lo = c.iter().map(|&i| scores[i]).fold(f64::INFINITY, f64::min);
                let hi = c
                    .iter()
                    .map(|&i| scores[i])
                    .fold(f64::NEG_INFINITY, f64::max);
                (x_of(lo), x_of(hi))
            })
            .collect();
        bars.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        for (lo, hi) in bars {
            let level = (0..)
                .find(|&l| {
                    !bar_levels
                        .iter()
                        .any(|&(end, lev)| lev == l && lo <= end + 4.0)
                })
                .unwrap();
            bar_levels.push((hi, level));
            n_levels = n_levels.max(level + 1);
            let y = axis_y + 10.0 + level as f64 * 7.0;
            svg.push_str(&format!(
                r#"<line class="clique-bar" x1="{}" y1="{2}" x2="{}" y2="{2}" stroke="black" stroke-width="4.5" stroke-linecap="round"/>"#,
                px(lo - 2.0),
                px(hi + 2.0),
                px(y)
            ));
            svg.push('\n');
        }
    }

    // Method labels: the better half in a left column, the rest on the right,
    // each connected to its score position on the axis.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let n_left = k.div_ceil(2);
    let labels_y0 = axis_y + 10.0 + n_levels as f64 * 7.0 + 14.0;
    let row_h = 17.0;
    for (pos, &idx) in order.iter().enumerate() {
        let on_left = pos < n_left;
        let row = if on_left { pos } else { k - 1 - pos };
        let y = labels_y0 + row as f64 * row_h;
        let xs = x_of(scores[idx]);
        let (x_col, anchor, x_text) = if on_left {
            (x0 - 16.0, "end", x0 - 20.0)
        } else {
            (x1 + 16.0, "start", x1 + 20.0)
        };
        svg.push_str(&format!(
            r#"<polyline class="method-connector" points="{},{} {},{} {},{}" fill="none" stroke="black" stroke-width="1"/>"#,
            px(x_col),
            px(y),
            px(xs),
            px(y),
            px(xs),
            px(axis_y)
        ));
        svg.push_str(&format!(
            r#"<text class="method-label" x="{}" y="{}" text-anchor="{}" font-size="12">{} ({})</text>"#,
            px(x_text),
            px(y + 4.0),
            anchor,
            xml_escape(&names[idx]),
            format_score(scores[idx])
        ));
        svg.push('\n');
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn format_score(s: f64) -> String {
    let t = format!("{s:.4}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    t.to_owned()
}
