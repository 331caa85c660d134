"""Command-line interface: `convplot plot --csv <paths...> --ref-slope {1,2} --out <file>`."""

import argparse
import sys

from .plots import CsvError, PlotSpec, plot_convergence, validate_csv


def build_parser():
    parser = argparse.ArgumentParser(
        prog="convplot",
        description="Log-log convergence figures from result CSV tables")
    sub = parser.add_subparsers(dest="command", required=True)

    p_plot = sub.add_parser("plot", help="render a convergence figure")
    p_plot.add_argument("--csv", nargs="+", required=True, metavar="PATH",
                        help="input CSV files (one series per file)")
    p_plot.add_argument("--ref-slope", type=int, choices=(1, 2), default=1,
                        help="slope of the dashed reference line")
    p_plot.add_argument("--out", required=True, metavar="FILE",
                        help="output image path (vector format recommended)")
    p_plot.add_argument("--label", action="append", default=None,
                        help="series label, repeat once per CSV")
    p_plot.add_argument("--title", default=None)

    p_val = sub.add_parser("validate", help="check CSV files against the schema")
    p_val.add_argument("--csv", nargs="+", required=True, metavar="PATH")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            spec = PlotSpec(csv_paths=args.csv, out_path=args.out,
                            ref_slope=args.ref_slope, labels=args.label,
                            title=args.title)
            out = plot_convergence(spec)
            print("wrote %s" % out)
        else:
            for path in args.csv:
                report = validate_csv(path)
                print("%s: ok, %d rows" % (report.path, report.num_rows))
    except CsvError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
