use kuengine_core::ass::{e2_dims, e2_window, e_infinity, matching_audit, predicted_differential, Family, TowerKind};
use kuengine_core::ku::KuCohomology;
use kuengine_core::monomial::Monomial;
use kuengine_core::padic::Prime;

fn prime(p: u32) -> Prime {
    Prime::new(p).unwrap()
}

#[test]
fn low_e2_classes() {
    let two = prime(2);
    let e2 = e2_dims(two, 40, 6);
    // q only occurs as v^2 q, which is also h0^2 x5
    assert_eq!(e2.get(&(9, 0)), None);
    assert_eq!(e2.get(&(5, 2)), Some(&1));
    let qz2 = Monomial::q().mul(&Monomial::z(2, 1)).unwrap();
    assert_eq!(qz2.degree(two), 27);
    let page = e2_window(two, 0, 40, 6).unwrap();
    assert!(page.find(TowerKind::Main, &qz2, 0).is_some());
    assert!(page.basis(27, 0).iter().any(|l| l == "q z2"));
    let three = prime(3);
    let page = e2_window(three, 0, 20, 4).unwrap();
    assert_eq!(page.basis(7, 1), vec!["v q".to_string()]);
}

#[test]
fn y_power_differentials() {
    let two = prime(2);
    let page = e2_window(two, -20, 30, 12).unwrap();
    let y1 = page.find(TowerKind::H0Tower, &Monomial::y(two, 1, 1), 0).unwrap();
    let d = predicted_differential(two, &page.towers()[y1]).unwrap().unwrap();
    assert_eq!(d.r, 2);
    let target = page.find(d.target_kind, &d.target_gen, d.target_h0).unwrap();
    assert_eq!(page.towers()[target].label(two, d.shift), "v^2 q");
    let y2 = page.find(TowerKind::H0Tower, &Monomial::y(two, 1, 2), 0).unwrap();
    let d = predicted_differential(two, &page.towers()[y2]).unwrap().unwrap();
    assert_eq!(d.r, 3);
    let target = page.find(d.target_kind, &d.target_gen, d.target_h0).unwrap();
    assert_eq!(page.towers()[target].label(two, d.shift), "h0 v^2 q y1");
}

#[test]
fn z_towers_are_never_sources() {
    for p in [2, 3] {
        let pr = prime(p);
        let page = e2_window(pr, 0, 120, 4).unwrap();
        for t in page.towers() {
            if t.kind == TowerKind::Main && !t.gen.has_q() && t.gen.y0_exponent() == 0 {
                assert_eq!(predicted_differential(pr, t).unwrap(), None, "{}", t.label(pr, 0));
            }
        }
    }
}

#[test]
fn e_infinity_matches_chart_on_small_window() {
    for (p, n_hi) in [(2, 40), (3, 60), (5, 100)] {
        let pr = prime(p);
        let ku = KuCohomology::new(pr, n_hi).unwrap();
        let chart = ku.chart().bidegree_counts(i64::MIN / 4, n_hi);
        let s_top = chart.keys().map(|k| k.1).max().unwrap_or(0);
        let run = e_infinity(pr, n_hi, s_top + 3).unwrap();
        let got: Vec<((i64, u32), u64)> = run.trusted_dims().into_iter().map(|(k, v)| (k, v as u64)).collect();
        let want: Vec<((i64, u32), u64)> = chart.into_iter().collect();
        assert_eq!(got, want, "p = {p}");
        let m = matching_audit(pr, n_hi, s_top + 3).unwrap();
        assert!(m.pass(), "p = {p}: {m:?}");
    }
}

#[test]
fn every_family_fires() {
    for p in [2, 3] {
        let run = e_infinity(prime(p), 80, 20).unwrap();
        for f in [Family::YPower, Family::YZ, Family::QTower, Family::QZ] {
            assert!(run.differentials.iter().any(|d| d.family == f), "p = {p}, {f:?}");
        }
        for d in &run.differentials {
            let t = &run.e_infinity.towers()[d.target];
            let s = &run.e_infinity.towers()[d.source];
            let vd = prime(p).v_degree();
            assert_eq!(t.degree - vd * d.shift as i64, s.degree + 1, "{}", d.source_label);
            assert_eq!(t.filtration + d.shift, s.filtration + d.r, "{}", d.source_label);
        }
    }
}
