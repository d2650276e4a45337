use sullivan::cohomology::verify_classes;
use sullivan::dsl::parse_element;
use sullivan::models::xr_model;
use sullivan::{betti, Element};

fn classes() -> Vec<Element> {
    let c = xr_model(5);
    include_str!("data/x5_classes.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| parse_element(c.signature(), l).unwrap())
        .collect()
}

#[test]
fn listed_classes_have_expected_degrees() {
    let elems = classes();
    assert_eq!(elems.len(), 26);
    let mut counts = vec![0usize; 8];
    let sig = xr_model(5).signature().clone();
    for e in &elems {
        let (m, _) = e.terms().iter().next().unwrap();
        counts[sig.degree_of(m) as usize] += 1;
    }
    assert_eq!(counts, [1, 2, 4, 6, 6, 4, 2, 1]);
    assert_eq!(betti(&xr_model(5)).unwrap().per_degree, counts);
}

#[test]
fn listed_classes_form_a_basis() {
    let v = verify_classes(&xr_model(5), &classes()).unwrap();
    assert!(v.all_closed && v.independent && v.spanning, "{v:?}");
    assert_eq!(v.non_closed, None);
    assert_eq!(v.dependency, None);
    assert_eq!(v.missing_degree, None);
}

#[test]
fn dropping_a_class_breaks_spanning() {
    let mut elems = classes();
    elems.remove(6);
    let v = verify_classes(&xr_model(5), &elems).unwrap();
    assert!(v.all_closed && v.independent);
    assert!(!v.spanning);
    assert_eq!(v.missing_degree, Some(2));
}

#[test]
fn perturbed_class_is_caught() {
    let c = xr_model(5);
    let mut elems = classes();
    // d(b x2) = a b x1
    elems[3] = parse_element(c.signature(), "b*x1 + b*x2").unwrap();
    let v = verify_classes(&c, &elems).unwrap();
    assert!(!v.all_closed);
    assert_eq!(v.non_closed, Some(3));
}
