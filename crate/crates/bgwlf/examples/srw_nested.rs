//! Harris' correspondence between random-walk excursions and plane trees.

use bgwlf::srw::{extract_nested, harris_mechanism, reconstruct_excursion, theta_pmf_r0, ExcursionPath, PlaneTree, SrwParams};

fn main() {
    let path = ExcursionPath::parse_compact("0123234343454343210").unwrap();
    let c = extract_nested(&path).unwrap();
    println!("N = {:?}, H = {}, theta = {}, Nbar = {}, A = {}, B = {}", c.n, c.h, c.theta, c.nbar, c.area, c.restricted_area);

    let tree = PlaneTree::from_excursion(&path).unwrap();
    println!("offspring (preorder) {:?}, levels {:?}", tree.offspring, tree.level_counts());
    let params = SrwParams::from_pq(0.5, 0.5).unwrap();
    assert_eq!(reconstruct_excursion(&tree, &params).unwrap(), path);

    let marked = ExcursionPath::parse_compact("01(222)(33)23(4444)3434(55)4343210").unwrap();
    let c = extract_nested(&marked).unwrap();
    println!("with holds: N = {:?}, rises = {:?}, A = {}, B = {}", c.n, c.rises, c.area, c.restricted_area);

    println!("nested mechanism at p = q = 1/2: {:?}", harris_mechanism(&params));
    let theta: Vec<String> = (1..8).step_by(2).map(|n| format!("{:.5}", theta_pmf_r0(&params, n))).collect();
    println!("P(theta = 1, 3, 5, 7) = {}", theta.join(" "));
}
