use std::io;

fn main() {
    // Deep terms and long continuations recurse; give them room.
    let code = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(|| {
            let stdin = io::stdin();
            let mut input = stdin.lock();
            let mut out = io::stdout();
            let mut err = io::stderr();
            let mut io = ddc_core::cli::Io {
                input: &mut input,
                out: &mut out,
                err: &mut err,
            };
            ddc_core::cli::main_with(std::env::args_os(), &mut io)
        })
        .expect("spawn main thread")
        .join()
        .unwrap_or(ddc_core::cli::EXIT_ERROR);
    std::process::exit(code);
}
