use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tokio::net::TcpListener;

use touchboard_bridge::{serve, BridgeConfig};

const EXIT_BIND: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "touchboard-bridge",
    version,
    about = "Serve the simulated board over WebSocket"
)]
struct Args {
    #[arg(long, default_value_t = 8943)]
    port: u16,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    host: IpAddr,
    /// Directory with the built UI, served at `/`.
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let addr = SocketAddr::new(args.host, args.port);
    let listener = match TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("touchboard-bridge: cannot bind {addr}: {e}");
            return ExitCode::from(EXIT_BIND);
        }
    };
    eprintln!("touchboard-bridge: listening on http://{addr}");
    let config = BridgeConfig {
        static_dir: args.static_dir,
        ..Default::default()
    };
    tokio::select! {
        r = serve(listener, config) => match r {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("touchboard-bridge: {e}");
                ExitCode::FAILURE
            }
        },
        _ = tokio::signal::ctrl_c() => ExitCode::SUCCESS,
    }
}
