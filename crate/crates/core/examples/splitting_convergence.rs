//! Distance between the split and the unsplit scheme on refined grids for a
//! short desk-scale cycle with ASM1, then the self-convergence of the
//! settling-only desk run.

use sbr_settling::cli::{convergence_table, ConvergenceArgs, Mode, SchemeArg};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let split_vs_unsplit = ConvergenceArgs {
        config: "bundled:desk_asm1".into(),
        cells: vec![25, 50, 100],
        at: 0.2 * 3600.0,
        mode: Mode::SplitVsUnsplit,
        scheme: SchemeArg::Split,
        out: None,
    };
    println!("split vs unsplit, desk_asm1 at 0.2 h");
    for row in convergence_table(&split_vs_unsplit)? {
        println!("  N = {:>4}  D = {:.4e}  ratio {}", row.cells, row.value, row.ratio.map_or("-".into(), |r| format!("{r:.3}")));
    }

    let refinement = ConvergenceArgs {
        config: "bundled:desk_settle".into(),
        cells: vec![25, 50, 100, 200],
        at: 180.0,
        mode: Mode::SelfRefinement,
        ..split_vs_unsplit
    };
    println!("self refinement, desk_settle at 180 s");
    for row in convergence_table(&refinement)? {
        println!("  N = {:>4}  D = {:.4e}  ratio {}", row.cells, row.value, row.ratio.map_or("-".into(), |r| format!("{r:.3}")));
    }
    Ok(())
}
