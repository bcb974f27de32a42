// Radial drawing: leaves evenly spaced on a circle, internal tree vertices
// at radius proportional to their distance from the centre, outer-cycle
// edges as chords.

use std::collections::VecDeque;
use std::f64::consts::PI;

use histsnark::tree::{vertex_count, MAX_DEPTH, MIN_DEPTH};
use histsnark::{ti_hists, CubicGraph};
use svg::node::element::{Circle, Group, Line, Text, Title};
use svg::Document;

use crate::exit::{Fail, PRECONDITION};
use crate::input::{Input, Source};

const RADIUS: f64 = 380.0;
const PALETTE: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

pub struct Layout {
    pub depth: usize,
    pub positions: Vec<(f64, f64)>,
    pub tree_edges: Vec<(usize, usize)>,
    /// Leaf-leaf edges grouped by outer cycle.
    pub cycles: Vec<Vec<(usize, usize)>>,
}

/// Uses the construction tree for outer-cycle input and the first `T_i`
/// Hist (by centre) for graph6 input.
pub fn layout(input: &Input, depth: Option<usize>) -> Result<Layout, Fail> {
    let g = &input.graph;
    match &input.source {
        Source::Tree { tree, .. } => {
            let leaf_pos: Vec<Option<usize>> = (0..g.order()).map(|v| tree.is_leaf(v).then_some(v)).collect();
            Ok(place(g, tree.edges(), tree.center(), tree.depth(), &leaf_pos))
        }
        Source::Graph6 => {
            let d = (MIN_DEPTH..=MAX_DEPTH)
                .find(|&d| vertex_count(d) == g.order())
                .filter(|&d| depth.is_none_or(|want| want == d))
                .ok_or_else(|| Fail::new(PRECONDITION, format!("no T_i of the requested depth has {} vertices", g.order())))?;
            let hists = ti_hists(g, d);
            let hist = hists.first().ok_or_else(|| Fail::new(PRECONDITION, format!("graph has no T_{d} Hist")))?;
            let adj = tree_adjacency(g.order(), &hist.tree_edges);
            let centre = (0..g.order())
                .find(|&v| adj[v].len() == 3 && eccentricity(&adj, v) == d)
                .expect("a T_i Hist has a centre");
            // Leaves in depth-first order from the centre.
            let mut leaf_pos = vec![None; g.order()];
            let mut next = 0;
            let mut stack = vec![(centre, usize::MAX)];
            while let Some((v, from)) = stack.pop() {
                if adj[v].len() == 1 && v != centre {
                    leaf_pos[v] = Some(next);
                    next += 1;
                }
                let mut kids: Vec<usize> = adj[v].iter().copied().filter(|&w| w != from).collect();
                kids.sort_unstable_by(|a, b| b.cmp(a));
                stack.extend(kids.into_iter().map(|w| (w, v)));
            }
            Ok(place(g, &hist.tree_edges, centre, d, &leaf_pos))
        }
    }
}

fn tree_adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

fn bfs(adj: &[Vec<usize>], root: usize) -> (Vec<usize>, Vec<usize>) {
    let mut level = vec![usize::MAX; adj.len()];
    let mut order = Vec::with_capacity(adj.len());
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    (level, order)
}

fn eccentricity(adj: &[Vec<usize>], v: usize) -> usize {
    bfs(adj, v).0.into_iter().max().unwrap_or(0)
}

fn place(g: &CubicGraph, tree_edges: &[(usize, usize)], centre: usize, depth: usize, leaf_pos: &[Option<usize>]) -> Layout {
    let n = g.order();
    let leaves = leaf_pos.iter().flatten().count();
    let adj = tree_adjacency(n, tree_edges);
    let (level, order) = bfs(&adj, centre);
    // Range of leaf positions below each vertex, children before parents.
    let mut lo = vec![usize::MAX; n];
    let mut hi = vec![0; n];
    for &v in order.iter().rev() {
        if let Some(p) = leaf_pos[v] {
            lo[v] = p;
            hi[v] = p;
        }
        for &w in &adj[v] {
            if level[w] == level[v] + 1 {
                lo[v] = lo[v].min(lo[w]);
                hi[v] = hi[v].max(hi[w]);
            }
        }
    }
    let angle = |pos: f64| -PI / 2.0 + 2.0 * PI * pos / leaves as f64;
    let positions = (0..n)
        .map(|v| {
            if v == centre {
                return (0.0, 0.0);
            }
            let r = RADIUS * level[v] as f64 / depth as f64;
            let a = angle((lo[v] + hi[v]) as f64 / 2.0);
            (round(r * a.cos()), round(r * a.sin()))
        })
        .collect();

    let mut tree: Vec<(usize, usize)> = tree_edges.to_vec();
    tree.sort_unstable();
    let chords: Vec<(usize, usize)> = g.edges().iter().copied().filter(|e| tree.binary_search(e).is_err()).collect();
    Layout {
        depth,
        positions,
        tree_edges: tree,
        cycles: group_cycles(n, &chords, leaf_pos),
    }
}

fn group_cycles(n: usize, chords: &[(usize, usize)], leaf_pos: &[Option<usize>]) -> Vec<Vec<(usize, usize)>> {
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], v: usize) -> usize {
        let mut v = v;
        while root[v] != v {
            root[v] = root[root[v]];
            v = root[v];
        }
        v
    }
    for &(u, v) in chords {
        let (a, b) = (find(&mut root, u), find(&mut root, v));
        root[a.max(b)] = a.min(b);
    }
    let mut groups: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for &(u, v) in chords {
        let r = find(&mut root, u);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, list)) => list.push((u, v)),
            None => groups.push((r, vec![(u, v)])),
        }
    }
    let first = |list: &[(usize, usize)]| list.iter().flat_map(|&(u, v)| [u, v]).filter_map(|x| leaf_pos[x]).min();
    groups.sort_by_key(|(_, list)| first(list));
    groups.into_iter().map(|(_, list)| list).collect()
}

fn round(x: f64) -> f64 {
    let r = (x * 100.0).round() / 100.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn render(layout: &Layout, title: &str) -> String {
    let margin = RADIUS + 30.0;
    let mut doc = Document::new()
        .set("viewBox", (-margin, -margin, 2.0 * margin, 2.0 * margin))
        .set("width", 2.0 * margin)
        .set("height", 2.0 * margin)
        .add(Title::new(title));
    doc = doc.add(
        Circle::new()
            .set("cx", 0)
            .set("cy", 0)
            .set("r", RADIUS)
            .set("fill", "none")
            .set("stroke", "#cccccc")
            .set("stroke-dasharray", "4 4"),
    );
    let line = |(u, v): (usize, usize)| {
        let ((x1, y1), (x2, y2)) = (layout.positions[u], layout.positions[v]);
        Line::new().set("x1", x1).set("y1", y1).set("x2", x2).set("y2", y2)
    };
    let mut tree = Group::new().set("class", "tree").set("stroke", "#000000").set("stroke-width", 1.5);
    for &e in &layout.tree_edges {
        tree = tree.add(line(e));
    }
    doc = doc.add(tree);
    for (k, cycle) in layout.cycles.iter().enumerate() {
        let mut group = Group::new()
            .set("class", "outer-cycle")
            .set("stroke", PALETTE[k % PALETTE.len()])
            .set("stroke-width", 1.5);
        for &e in cycle {
            group = group.add(line(e));
        }
        doc = doc.add(group);
    }
    let mut vertices = Group::new().set("class", "vertices").set("font-size", 10).set("text-anchor", "middle");
    let labels = layout.positions.len() <= 100;
    for (v, &(x, y)) in layout.positions.iter().enumerate() {
        vertices = vertices.add(
            Circle::new()
                .set("cx", x)
                .set("cy", y)
                .set("r", 4)
                .set("fill", "#ffffff")
                .set("stroke", "#000000"),
        );
        if labels {
            vertices = vertices.add(Text::new(v.to_string()).set("x", x).set("y", round(y - 7.0)));
        }
    }
    doc.add(vertices).to_string() + "\n"
}
