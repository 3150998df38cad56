use std::collections::BTreeMap;

use kuengine_core::chart::{AbelianPGroup, Chart};
use kuengine_core::ku::{assoc_graded_dims, assoc_graded_towers, build_s, even_part, odd_part, Block, KuCohomology};
use kuengine_core::monomial::Monomial;
use kuengine_core::padic::nu;
use kuengine_core::Prime;

fn p(n: u32) -> Prime {
    Prime::new(n).unwrap()
}

fn low_end(prime: Prime, gen: &Monomial, h: u32) -> i64 {
    gen.degree(prime) - prime.v_degree() * (h as i64 - 1)
}

fn towers_below(prime: Prime, c: &Chart, d: i64) -> Vec<(String, u32)> {
    let mut v: Vec<(String, u32)> = c
        .towers()
        .iter()
        .filter(|t| low_end(prime, &t.gen, t.height) <= d)
        .map(|t| (t.gen.render(prime), t.height))
        .collect();
    v.sort();
    v
}

#[test]
fn associated_graded_matches_assembly() {
    for prime in [p(2), p(3)] {
        let ku = KuCohomology::new(prime, 200).unwrap();
        let mut formula: Vec<(String, u32)> =
            assoc_graded_towers(prime, 200).unwrap().into_iter().map(|(m, h)| (m.render(prime), h)).collect();
        formula.sort();
        assert_eq!(towers_below(prime, ku.chart(), 200), formula);
        let counts = ku.chart().bidegree_counts(0, 200);
        for n in 0..=200 {
            let dots: u64 = counts.iter().filter(|((d, _), _)| *d == n).map(|(_, c)| *c).sum();
            assert_eq!(assoc_graded_dims(prime, n).unwrap(), dots, "p = {}, degree {n}", prime.get());
        }
    }
}

#[test]
fn group_length_equals_dot_count() {
    for prime in [p(2), p(3)] {
        let ku = KuCohomology::new(prime, 160).unwrap();
        for n in 0..=160 {
            let len = ku.group_at(n).unwrap().log_order();
            assert_eq!(len as usize, ku.chart().dots_at(n).len(), "degree {n}");
        }
    }
}

#[test]
fn low_degree_groups() {
    let ku = KuCohomology::new(p(2), 120).unwrap();
    for n in [1, 3, 5, 7] {
        assert!(ku.group_at(n).unwrap().is_trivial());
    }
    assert_eq!(ku.group_at(8).unwrap().to_string(), "Z/4");
    let g82 = ku.group_at(82).unwrap();
    assert!(g82.contains_summand(&AbelianPGroup::from_exponents(2, vec![3, 1])));
    assert!(ku.group_at(121).is_err());
    for n in 0..=110 {
        assert_eq!(ku.homology_group_at(n).unwrap(), ku.group_at(n + 4).unwrap());
    }
}

#[test]
fn parity_split() {
    for prime in [p(2), p(3), p(5)] {
        let even = even_part(prime, 300).unwrap();
        let odd = odd_part(prime, 300).unwrap();
        for t in 0..even.towers().len() {
            assert_eq!(even.tower_degree(t) % 2, 0);
        }
        for t in 0..odd.towers().len() {
            assert_eq!(odd.tower_degree(t).rem_euclid(2), 1);
        }
        let lowest_odd = (0..odd.towers().len())
            .map(|t| low_end(prime, &odd.towers()[t].gen, odd.towers()[t].height))
            .min()
            .unwrap();
        assert!(lowest_odd >= prime.q_degree());
    }
}

#[test]
fn no_edge_leaves_its_summand() {
    for prime in [p(2), p(3)] {
        let ku = KuCohomology::new(prime, 250).unwrap();
        let mut owner = vec![usize::MAX; ku.chart().towers().len()];
        for (i, s) in ku.summands().iter().enumerate() {
            for t in s.towers.clone() {
                assert_eq!(owner[t], usize::MAX);
                owner[t] = i;
            }
        }
        assert!(owner.iter().all(|&o| o != usize::MAX));
        for e in ku.chart().edges() {
            assert!(e.dst.len() == 1 || e.dst.len() == 2);
            for t in &e.dst {
                assert_eq!(owner[e.src.tower], owner[t.dot.tower]);
            }
        }
        // the monomial 1 multiplies A_k but never B_k
        for s in ku.summands() {
            if let Block::B(_) = s.block {
                assert!(!s.cofactor.is_one());
            }
        }
        assert!(ku.summands().iter().any(|s| s.block == Block::A(3) && s.cofactor.is_one()));
    }
}

#[test]
fn odd_summand_shapes() {
    let two = p(2);
    let ku = KuCohomology::new(two, 120).unwrap();
    let mut smallest_l: BTreeMap<u64, u32> = BTreeMap::new();
    for s in ku.summands() {
        if let Block::S(k, l) = s.block {
            let i = s.cofactor.y0_exponent() / 2 + 1;
            assert_eq!(k, nu(two, i).unwrap() + 1);
            let e = smallest_l.entry(i).or_insert(l);
            *e = (*e).min(l);
        }
    }
    assert_eq!(smallest_l[&1], 2);
    assert_eq!(smallest_l[&2], 3);
    // q S_{1,2}: one tower on q z_2 in degree 27 of height 2
    let s = build_s(two, 1, 2).unwrap().tensor_monomial(&Monomial::q()).unwrap();
    assert_eq!(s.towers().len(), 1);
    assert_eq!((s.tower_degree(0), s.towers()[0].height), (27, 2));
}

#[test]
fn height_law() {
    for prime in [p(2), p(3)] {
        let ku = KuCohomology::new(prime, 400).unwrap();
        for s in ku.summands() {
            for t in s.towers.clone() {
                let tower = &ku.chart().towers()[t];
                let Some(j) = tower.gen.min_z_index() else { continue };
                let Some(rest) = tower.gen.div(&Monomial::z(j, 1)) else {
                    continue;
                };
                let pj = prime.pow(j) as u32;
                match s.block {
                    Block::B(_) => assert_eq!(tower.height, pj - j),
                    Block::A(_) if j > 0 && !rest.has_z() => {
                        assert_eq!(tower.height, pj)
                    }
                    _ => {}
                }
            }
        }
    }
}
