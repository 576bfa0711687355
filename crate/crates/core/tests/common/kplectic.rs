use nqcalc_core::algebroid::{algebroid_context, check_homological, AlgebroidData};
use nqcalc_core::classifiers::spencer_op::algebroid_q;
use nqcalc_core::poly::GradedPoly as P;
use nqcalc_core::VectorValuedForm;

use super::algebroid_corpus;

pub fn homological_corpus() -> Vec<(String, AlgebroidData)> {
    algebroid_corpus()
        .into_iter()
        .filter(|c| check_homological(&algebroid_q(&c.a).unwrap()).unwrap().homological)
        .map(|c| (c.name, c.a))
        .collect()
}

/// `A = wedge^k T*M` with zero anchor and bracket, `l` the identity.
pub fn tautological(m: usize, k: usize) -> (AlgebroidData, Vec<VectorValuedForm>) {
    let base: Vec<String> = (0..m).map(|i| format!("x{}", i + 1)).collect();
    let mut idx = Vec::new();
    fn subsets(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            subsets(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    subsets(0, m, k, &mut Vec::new(), &mut idx);
    let fibers: Vec<String> = idx.iter().map(|s| format!("p{}", s.iter().map(|i| (i + 1).to_string()).collect::<String>())).collect();
    let ctx = algebroid_context(&base, &fibers, &[] as &[String]).unwrap();
    let a = AlgebroidData::abelian(&ctx).unwrap();
    let ell = idx
        .iter()
        .map(|s| {
            let mut p = P::one(&ctx);
            for &i in s {
                p = &p * &P::differential_of(&ctx, ctx.base_index(i));
            }
            VectorValuedForm::scalar(p).unwrap()
        })
        .collect();
    (a, ell)
}
