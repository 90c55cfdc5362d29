use std::fs::File;
use std::io::BufReader;

use blepin::channel::{fit_path_loss, read_measurements};

use crate::cli::FitArgs;
use crate::error::CliError;

pub fn run(args: FitArgs) -> Result<(), CliError> {
    if args.config.is_some() {
        // fit has no settings beyond its flags; still reject a missing file.
        crate::config::load_layers(args.config.as_ref())?;
    }
    let file = File::open(&args.input)
        .map_err(|e| CliError::io(format!("opening {}", args.input.display()), e))?;
    let samples = read_measurements(BufReader::new(file))?;
    let fit = fit_path_loss(&samples, args.d0)?;
    println!("alpha_hat {:.9}", fit.alpha_hat);
    println!("rssi0_hat {:.6}", fit.rssi0_hat);
    println!("rmse_db   {:.6}", fit.rmse_db);
    println!("n         {}", fit.n);
    if let Some(expected) = args.expect_alpha {
        println!("alpha_dev {:+.9}", fit.alpha_hat - expected);
    }
    Ok(())
}
