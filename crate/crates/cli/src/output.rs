//! Text rendering; the JSON mode mirrors the same numbers verbatim.

use fcx_core::complexes::SimplicialComplex;
use fcx_core::homology::HomologyResult;

pub fn homology_lines(h: &HomologyResult) -> Vec<String> {
    let mut lines = Vec::new();
    for d in &h.degrees {
        if d.degree < 0 && d.betti == 0 && d.torsion.is_empty() {
            continue;
        }
        let mut terms: Vec<String> = Vec::new();
        match d.betti {
            0 => {}
            1 => terms.push("Z".to_string()),
            b => terms.push(format!("Z^{b}")),
        }
        for t in &d.torsion {
            terms.push(format!("Z/{t}"));
        }
        let group = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" ⊕ ")
        };
        lines.push(format!("H~_{} = {}", d.degree, group));
    }
    lines
}

pub fn complex_summary(k: &SimplicialComplex) -> Vec<String> {
    vec![
        format!("vertices: {}", k.vertex_count()),
        format!("facets: {}", k.facet_count()),
        format!("dimension: {}", k.dimension()),
        format!(
            "f-vector: [{}]",
            k.f_vector()
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ]
}
