use std::path::Path;

use anyhow::{anyhow, Context};
use dish_core::coverage::svg::render_svg;
use dish_core::coverage::{covered_at, Altruist};
use dish_core::{load_topology, plan, CoverageError, PlacementDoc, Plan, Point, PsmMode, SolverKind, Topology};

use crate::exit::{read_input, write_output, Failure, Outcome, WithCode, DEGENERATE, INPUT, INTERNAL};

fn load(path: &Path) -> Result<Topology, Failure> {
    let text = read_input(path)?;
    load_topology(&text).with_context(|| path.display().to_string()).code(INPUT)
}

fn planned(t: &Topology, mode: PsmMode, solver: SolverKind) -> Result<Plan, Failure> {
    plan(t, mode, solver).map_err(|e| match e {
        CoverageError::DegenerateArrangement { a, b, .. } => Failure {
            code: DEGENERATE,
            error: anyhow::Error::new(e).context(format!(
                "peers `{}` and `{}`: move either one slightly and re-run",
                t.id(a),
                t.id(b)
            )),
        },
        other => Failure { code: INTERNAL, error: other.into() },
    })
}

pub fn run(
    topology: &Path,
    mode: PsmMode,
    solver: SolverKind,
    budget: Option<usize>,
    out: Option<&Path>,
    svg: Option<&Path>,
) -> Outcome {
    let t = load(topology)?;
    let p = planned(&t, mode, solver)?;
    if let Some(budget) = budget {
        if p.placement.k() > budget {
            let e = CoverageError::OverBudget { minimum: p.placement.k(), budget };
            return Err(e).code(INTERNAL);
        }
    }
    let json = serde_json::to_string_pretty(&p.to_doc(&t)).code(INTERNAL)? + "\n";
    match out {
        Some(path) => write_output(path, &json)?,
        None => print!("{json}"),
    }
    if let Some(path) = svg {
        write_output(path, &render_svg(&t, &p))?;
    }
    eprintln!(
        "k={} orphanages={} unsafe_pairs={} solver={:?}",
        p.placement.k(),
        p.orphanages.len(),
        p.unsafe_pairs.len(),
        p.placement.solver
    );
    Ok(())
}

pub fn load_placement(path: &Path) -> Result<PlacementDoc, Failure> {
    let text = read_input(path)?;
    serde_json::from_str(&text).with_context(|| format!("malformed placement {}", path.display())).code(INPUT)
}

pub fn render(topology: &Path, mode: PsmMode, solver: SolverKind, placement: Option<&Path>, svg: &Path) -> Outcome {
    let t = load(topology)?;
    let mut p = planned(&t, mode, solver)?;
    if let Some(path) = placement {
        let doc = load_placement(path)?;
        p.placement.altruists = doc
            .altruists
            .iter()
            .map(|a| {
                let position = Point::new(a.x, a.y);
                let covers = covered_at(&t, &p.unsafe_pairs, position);
                let orphanage = p.orphanages.iter().position(|h| h.ups == covers).unwrap_or(usize::MAX);
                Altruist { position, orphanage, covers }
            })
            .collect();
        for (k, pair) in p.unsafe_pairs.pairs().enumerate() {
            if !p.placement.altruists.iter().any(|a| a.covers.contains(&k)) {
                eprintln!("warning: unsafe pair {}-{} is not covered", t.id(pair.lo), t.id(pair.hi));
            }
        }
    }
    if p.placement.altruists.iter().any(|a| !a.position.is_finite()) {
        return Err(anyhow!("placement has non-finite coordinates")).code(INPUT);
    }
    write_output(svg, &render_svg(&t, &p))
}
