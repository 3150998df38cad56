use std::collections::{BTreeMap, BTreeSet};

use kuengine_core::chart::{Chart, Dot, EdgeKind};
use kuengine_core::ku::{build_a, build_b, build_s, CoreCharts};
use kuengine_core::monomial::Monomial;
use kuengine_core::Prime;

fn p(n: u32) -> Prime {
    Prime::new(n).unwrap()
}

fn m(prime: Prime, s: &str) -> Monomial {
    Monomial::parse(prime, s).unwrap()
}

fn height(c: &Chart, gen: &Monomial) -> u32 {
    c.towers()[c.find_tower(gen).expect("tower present")].height
}

// Dots of A_5 for p = 2, as (column, filtration) with column = (136 - degree) / 2,
// taken from a hand-drawn reference chart. The five top dots of the z_5 tower are
// drawn compressed there; they are listed at their true filtration.
const A5_REFERENCE_DOTS: &[(i64, u32)] = &[
    (0, 0),
    (1, 0),
    (1, 1),
    (2, 0),
    (2, 1),
    (3, 0),
    (3, 1),
    (3, 2),
    (4, 1),
    (4, 2),
    (4, 3),
    (5, 0),
    (5, 2),
    (5, 3),
    (5, 4),
    (6, 1),
    (6, 3),
    (6, 4),
    (7, 4),
    (7, 5),
    (8, 5),
    (8, 6),
    (9, 0),
    (9, 6),
    (9, 7),
    (10, 0),
    (10, 1),
    (10, 7),
    (10, 8),
    (11, 1),
    (11, 8),
    (11, 9),
    (12, 2),
    (12, 9),
    (12, 10),
    (13, 3),
    (13, 10),
    (13, 11),
    (14, 0),
    (14, 4),
    (14, 11),
    (15, 1),
    (15, 12),
    (16, 13),
    (17, 0),
    (17, 14),
    (18, 0),
    (18, 1),
    (18, 15),
    (19, 0),
    (19, 1),
    (19, 16),
    (20, 1),
    (20, 2),
    (20, 17),
    (21, 2),
    (21, 3),
    (21, 18),
    (22, 0),
    (22, 3),
    (22, 4),
    (22, 19),
    (23, 1),
    (23, 4),
    (23, 20),
    (24, 5),
    (24, 21),
    (25, 6),
    (25, 22),
    (26, 0),
    (26, 7),
    (26, 23),
    (27, 0),
    (27, 1),
    (27, 8),
    (27, 24),
    (28, 1),
    (28, 9),
    (28, 25),
    (29, 2),
    (29, 10),
    (29, 26),
    (30, 3),
    (30, 11),
    (30, 27),
    (31, 0),
    (31, 4),
    (31, 12),
    (31, 28),
    (32, 1),
    (32, 5),
    (32, 13),
    (32, 29),
    (33, 0),
    (33, 2),
    (33, 6),
    (33, 14),
    (33, 30),
    (34, 0),
    (34, 1),
    (34, 3),
    (34, 7),
    (34, 15),
    (34, 31),
];

// Every vertical line of the same chart as (column, low filtration, high filtration):
// a chain of p-multiplications running up that column.
const A5_REFERENCE_VERTICALS: &[(i64, u32, u32)] = &[
    (1, 0, 1),
    (5, 2, 4),
    (34, 0, 31),
    (3, 0, 2),
    (4, 1, 3),
    (5, 0, 4),
    (10, 0, 8),
    (11, 1, 9),
    (12, 2, 10),
    (13, 3, 11),
    (22, 0, 4),
    (22, 3, 19),
    (21, 2, 18),
    (20, 1, 17),
    (19, 0, 16),
    (27, 0, 8),
    (14, 0, 4),
    (23, 4, 20),
    (24, 5, 21),
    (25, 6, 22),
    (26, 7, 23),
    (27, 8, 24),
    (28, 1, 25),
    (29, 2, 26),
    (30, 3, 11),
    (31, 0, 4),
    (18, 0, 1),
    (19, 0, 1),
    (20, 1, 2),
    (21, 2, 3),
    (22, 3, 4),
    (2, 0, 1),
    (13, 10, 11),
    (6, 3, 4),
    (7, 4, 5),
    (8, 5, 6),
    (9, 6, 7),
    (10, 7, 8),
    (11, 8, 9),
    (12, 9, 10),
    (10, 0, 1),
    (27, 0, 1),
    (33, 0, 30),
    (32, 1, 29),
    (31, 4, 28),
    (30, 11, 27),
];

fn column(c: &Chart, d: Dot) -> i64 {
    (136 - c.dot_degree(d)) / 2
}

#[test]
fn a5_matches_reference_chart() {
    let two = p(2);
    let a5 = build_a(two, 5).unwrap();
    a5.validate().unwrap();
    let mut dots = BTreeMap::new();
    for (t, tower) in a5.towers().iter().enumerate() {
        for level in 0..tower.height {
            let d = Dot::new(t, level);
            let key = (column(&a5, d), a5.dot_filtration(d));
            assert!(dots.insert(key, d).is_none(), "two dots at {key:?}");
        }
    }
    let expected: BTreeSet<(i64, u32)> = A5_REFERENCE_DOTS.iter().copied().collect();
    let got: BTreeSet<(i64, u32)> = dots.keys().copied().collect();
    assert_eq!(got, expected);

    // every drawn vertical line is a chain of p-edges
    let reachable = |from: Dot, to: Dot| {
        let mut stack = vec![from];
        while let Some(d) = stack.pop() {
            if d == to {
                return true;
            }
            if let Some(e) = a5.edge_from(d) {
                stack.extend(e.dst.iter().map(|t| t.dot));
            }
        }
        false
    };
    for &(x, lo, hi) in A5_REFERENCE_VERTICALS {
        let (a, b) = (dots[&(x, lo)], dots[&(x, hi)]);
        assert!(reachable(a, b), "no p-chain from ({x},{lo}) to ({x},{hi})");
    }
    // and every edge lies on a drawn vertical line
    for e in a5.edges() {
        let x = column(&a5, e.src);
        let s0 = a5.dot_filtration(e.src);
        for t in &e.dst {
            let s1 = a5.dot_filtration(t.dot);
            assert!(
                A5_REFERENCE_VERTICALS.iter().any(|&(c, lo, hi)| c == x && lo <= s0 && s1 <= hi),
                "edge at column {x} from {s0} to {s1} not drawn"
            );
        }
    }
}

#[test]
fn b5_pure_z_towers() {
    let two = p(2);
    let b5 = build_b(two, 5).unwrap();
    b5.validate().unwrap();
    let heights: Vec<u32> = ["z2^2 z3 z4", "z3^2 z4", "z4^2", "z5"].iter().map(|s| height(&b5, &m(two, s))).collect();
    assert_eq!(heights, [2, 5, 12, 27]);
    assert_eq!(b5.towers().len(), 15);
}

#[test]
fn two_target_extension_in_degree_116() {
    let two = p(2);
    let b5 = build_b(two, 5).unwrap();
    let src = b5.find_tower(&m(two, "y3 z3 z4")).unwrap();
    assert_eq!(b5.tower_degree(src), 116);
    let edge = b5.edge_from(Dot::new(src, 0)).unwrap();
    let got: BTreeSet<(String, u32, EdgeKind)> =
        edge.dst.iter().map(|t| (b5.towers()[t.dot.tower].gen.render(two), t.dot.level, t.kind)).collect();
    let want: BTreeSet<(String, u32, EdgeKind)> =
        [("y3 z2^2 z4".to_string(), 1, EdgeKind::H0), ("z4^2".to_string(), 8, EdgeKind::Exotic)].into_iter().collect();
    assert_eq!(got, want);
}

#[test]
fn a5_degree_82() {
    let a5 = build_a(p(2), 5).unwrap();
    assert_eq!(a5.group_at(82).unwrap().to_string(), "Z/8 ⊕ Z/2");
}

#[test]
fn small_blocks() {
    let three = p(3);
    let b1 = build_b(three, 1).unwrap();
    assert_eq!(b1.towers().len(), 1);
    assert_eq!(height(&b1, &Monomial::z(1, 1)), 2);
    assert!(build_b(p(2), 1).is_err());
    let a1 = build_a(three, 1).unwrap();
    // p y_0^2 z_0 = v^2 z_1
    let src = a1.find_tower(&m(three, "y0^2 z0")).unwrap();
    let e = a1.edge_from(Dot::new(src, 0)).unwrap();
    assert_eq!(e.dst.len(), 1);
    assert_eq!(a1.towers()[e.dst[0].dot.tower].gen, Monomial::z(1, 1));
    assert_eq!(e.dst[0].dot.level, 2);
    assert_eq!(a1.group_at(12).unwrap().to_string(), "Z/9");
    let a1_two = build_a(p(2), 1).unwrap();
    assert_eq!(a1_two.group_at(8).unwrap().to_string(), "Z/4");
    assert_eq!(a1_two.group_at(10).unwrap().to_string(), "Z/2");
}

#[test]
fn blocks_are_v_compatible() {
    for prime in [2, 3, 5] {
        let prime = p(prime);
        let mut cores = CoreCharts::new(prime);
        for k in 0..=5 {
            if prime.get() == 5 && k > 3 {
                break;
            }
            cores.a(k).unwrap().validate().unwrap();
            if k >= prime.k0() {
                cores.b(k).unwrap().validate().unwrap();
            }
        }
    }
}

#[test]
fn generator_sets() {
    // B_k is generated by z_j times a choice of z_i^{p-1} or y_i^{p-1} for j <= i < k
    let three = p(3);
    let b3 = build_b(three, 3).unwrap();
    let mut gens: Vec<String> = b3.towers().iter().map(|t| t.gen.render(three)).collect();
    gens.sort();
    let mut want = Vec::new();
    for j in 1..=3u32 {
        let mut acc = vec![Monomial::z(j, 1)];
        for i in j..3 {
            acc = acc
                .into_iter()
                .flat_map(|g| [g.mul(&Monomial::z(i, 2)).unwrap(), g.mul(&Monomial::y(three, i, 2)).unwrap()])
                .collect();
        }
        want.extend(acc.into_iter().map(|g| g.render(three)));
    }
    want.sort();
    assert_eq!(gens, want);
    // A_k adds y_0^{p-1} ... y_{k-1}^{p-1} z_0
    let a3 = build_a(three, 3).unwrap();
    assert_eq!(a3.towers().len(), b3.towers().len() + 1);
    assert!(a3.find_tower(&m(three, "y0^2 y1^2 y2^2 z0")).is_some());
    // for p = 2 also z_1 y_1 ... y_{k-1}
    let a4 = build_a(p(2), 4).unwrap();
    let b4 = build_b(p(2), 4).unwrap();
    assert_eq!(a4.towers().len(), b4.towers().len() + 2);
    assert!(a4.find_tower(&m(p(2), "y1 y2 y3 z1")).is_some());
}

#[test]
fn s_block() {
    let two = p(2);
    let s = build_s(two, 5, 8).unwrap();
    let degrees: Vec<i64> = (0..s.towers().len()).map(|t| s.tower_degree(t)).collect();
    assert_eq!(degrees, [1038, 1036, 1034]);
    assert!(s.towers().iter().all(|t| t.height == 6));
    s.validate().unwrap();
    // chain of three towers: Z/8 in the middle degrees
    assert_eq!(s.group_at(1034).unwrap().to_string(), "Z/8");
    assert_eq!(s.group_at(1038).unwrap().to_string(), "Z/2");
}
