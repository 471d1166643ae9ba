"""Print the reduction of (2k+1)^(2r+1) for a range of r, one line per basis term."""

import argparse

from powerpartible.reduction import certificate_to_json, schroder_certificate, verify_certificate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rmax", type=int, default=4)
    ap.add_argument("--epsilon", type=int, choices=[1, -1], default=1)
    ap.add_argument("--z", type=int, default=None)
    args = ap.parse_args()

    for r in range(args.rmax + 1):
        cert = schroder_certificate(r, args.epsilon, args.z)
        data = certificate_to_json(cert)
        print(f"(2k+1)^{2 * r + 1}  [verified: {verify_certificate(cert)}]")
        for j, num, den in data["combo"]:
            print(f"    + ({num}) / {den} * L*(x_{j})")
        for i, num, *den in data["residual"]:
            print(f"    + ({num}) * (2k+1)^{i}")


if __name__ == "__main__":
    main()
