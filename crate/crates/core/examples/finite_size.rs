//! Small environments: reflected particles come back and the entropy rises again.

use pagecurve::scenario::{run_point, TimeGrid};
use pagecurve::ModelParams;

fn main() -> pagecurve::Result<()> {
    let times = TimeGrid::Uniform {
        t_max: 600.0,
        dt: 25.0,
    }
    .times();
    let sizes = [40usize, 100, 2000];
    let tables: Vec<_> = sizes
        .iter()
        .map(|&n| run_point(&ModelParams::new(20, n, 1.0, 1.0, 0.65)?, &times, &[]))
        .collect::<pagecurve::Result<_>>()?;
    print!("{:>6}", "t");
    for n in sizes {
        print!(" {:>10}", format!("S(N={n})"));
    }
    println!();
    for (i, t) in times.iter().enumerate() {
        print!("{t:6.0}");
        for table in &tables {
            print!(" {:10.4}", table.rows[i].record.s_vn);
        }
        println!();
    }
    Ok(())
}
