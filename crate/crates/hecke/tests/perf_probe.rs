use std::time::Instant;

use hecke::characters::character_table;

#[test]
#[ignore]
fn probe_projection_parts() {
    use hecke::characters::projection_coefficients;
    use hecke::diagrams::partitions_of;
    use hecke::oracle::verify_projection;

    for n in 5..=6usize {
        let shapes = partitions_of(n);
        let start = Instant::now();
        for g in &shapes {
            projection_coefficients(n, g).unwrap();
        }
        println!("n = {n}: coefficients in {:?}", start.elapsed());
    }
    let shapes = partitions_of(5);
    let start = Instant::now();
    for i in 0..shapes.len() {
        for j in i..shapes.len() {
            verify_projection(&shapes[i], &shapes[j]).unwrap();
        }
    }
    println!("n = 5 pairs: {:?}", start.elapsed());
}

#[test]
#[ignore]
fn probe_table_scaling() {
    for n in 5..=9 {
        let start = Instant::now();
        let table = character_table(n).unwrap();
        println!(
            "n = {n}: {} classes in {:?} [{}]",
            table.labels().len(),
            start.elapsed(),
            hecke::characters::stats::snapshot()
        );
    }
}
