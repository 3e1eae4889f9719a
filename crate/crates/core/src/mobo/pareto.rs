//! Dominance, non-dominated filtering and exact hypervolume, all in
//! maximization form.

use std::cmp::Ordering;

/// `a >= b` in every coordinate and `a > b` in at least one.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Indices (ascending) of the points no other point dominates. Copies of a
/// non-dominated point are all kept.
///
/// Points are visited in decreasing lexicographic order, so any dominator of
/// a point is visited before it, and it suffices to test against the front
/// kept so far.
pub fn pareto_filter<P: AsRef<[f64]>>(points: &[P]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lex_desc(points[i].as_ref(), points[j].as_ref()).then(i.cmp(&j)));
    let mut front: Vec<usize> = Vec::new();
    for i in order {
        let p = points[i].as_ref();
        if !front.iter().any(|&f| dominates(points[f].as_ref(), p)) {
            front.push(i);
        }
    }
    front.sort_unstable();
    front
}

fn strictly_above(p: &[f64], reference: &[f64]) -> bool {
    p.iter().zip(reference).all(|(x, r)| x > r)
}

/// Area dominated by 2-D points above `reference`.
fn hv2(points: &mut [[f64; 2]], reference: [f64; 2]) -> f64 {
    points.sort_by(|a, b| b[0].total_cmp(&a[0]).then(b[1].total_cmp(&a[1])));
    let mut area = 0.0;
    let mut best_y = reference[1];
    for p in points.iter() {
        if p[1] > best_y {
            area += (p[0] - reference[0]) * (p[1] - best_y);
            best_y = p[1];
        }
    }
    area
}

/// Lebesgue measure of the union of boxes `[reference, p]`.
///
/// Points that do not strictly dominate `reference` in every coordinate are
/// ignored. One to three objectives are supported; three are handled by
/// slicing along the last coordinate.
pub fn hypervolume<P: AsRef<[f64]>>(front: &[P], reference: &[f64]) -> f64 {
    let pts: Vec<&[f64]> = front
        .iter()
        .map(AsRef::as_ref)
        .filter(|p| strictly_above(p, reference))
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    match reference.len() {
        1 => pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) - reference[0],
        2 => {
            let mut p2: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
            hv2(&mut p2, [reference[0], reference[1]])
        }
        3 => {
            let mut sorted = pts;
            sorted.sort_by(|a, b| b[2].total_cmp(&a[2]));
            let r2 = [reference[0], reference[1]];
            let mut slice: Vec<[f64; 2]> = Vec::with_capacity(sorted.len());
            let mut volume = 0.0;
            for (i, p) in sorted.iter().enumerate() {
                slice.push([p[0], p[1]]);
                let next_z = sorted.get(i + 1).map_or(reference[2], |q| q[2]);
                let depth = p[2] - next_z;
                if depth > 0.0 {
                    volume += depth * hv2(&mut slice, r2);
                }
            }
            volume
        }
        d => panic!("hypervolume supports up to three objectives, got {d}"),
    }
}

/// Hypervolume gained by adding `y` to `front`, given the front's own
/// hypervolume `base`. Exactly zero when `y` adds nothing.
pub fn hypervolume_improvement<P: AsRef<[f64]>>(
    front: &[P],
    base: f64,
    y: &[f64],
    reference: &[f64],
) -> f64 {
    if !strictly_above(y, reference) {
        return 0.0;
    }
    if front
        .iter()
        .any(|p| p.as_ref().iter().zip(y).all(|(a, b)| a >= b))
    {
        return 0.0;
    }
    let mut all: Vec<&[f64]> = front.iter().map(AsRef::as_ref).collect();
    all.push(y);
    (hypervolume(&all, reference) - base).max(0.0)
}
