"""
Build script for creating a single-file executable of the homtomo command line
"""
import sys
import shutil
import subprocess
from pathlib import Path


def cleanup_old_builds(build_dir, dist_dir):
    """Clean up previous builds"""
    print("Cleaning up previous builds...")

    for directory in (build_dir, dist_dir):
        if directory.exists():
            try:
                shutil.rmtree(directory)
                print(f"{directory.name} directory cleaned.")
            except Exception as e:
                print(f"Warning: Could not clean {directory}: {e}")


def copy_required_files(dist_dir, project_dir):
    """Copy necessary files to the distribution folder"""
    print("Copying required files to distribution directory...")

    try:
        logs_dir = dist_dir / "logs"
        logs_dir.mkdir(exist_ok=True)
        print("Created logs directory.")

        # Copy configs folder
        config_src = project_dir / "configs"
        config_dest = dist_dir / "configs"
        if config_src.exists():
            if config_dest.exists():
                shutil.rmtree(config_dest)
            shutil.copytree(config_src, config_dest)
            print("Copied configs directory.")
    except Exception as e:
        print(f"Warning: Error copying files: {e}")


def main():
    """
    Build the command line as a console executable
    """
    print("Building homtomo...")

    project_dir = Path(__file__).parent
    build_dir = project_dir / "build"
    dist_dir = project_dir / "dist"
    cleanup_old_builds(build_dir, dist_dir)

    separator = ";" if sys.platform == "win32" else ":"
    args = [
        "pyinstaller",
        "--name=homtomo",
        "--console",
        "--onefile",
        "--hidden-import=appdirs",
        "--hidden-import=numpy",
        f"--paths={project_dir}",
        "--clean",
        f"--add-data={project_dir / 'configs'}{separator}configs",
        f"--distpath={dist_dir}",
        f"--workpath={build_dir}",
        f"--specpath={project_dir}",
        str(project_dir / "src" / "app" / "main.py"),
    ]

    try:
        print("\nRunning PyInstaller...")
        result = subprocess.run(args, check=True, capture_output=True, text=True)

        if result.stdout:
            print("\nPyInstaller Output:")
            print(result.stdout)

        if result.stderr:
            print("\nPyInstaller Errors/Warnings:")
            print(result.stderr)

    except subprocess.CalledProcessError as e:
        print(f"Build failed with exit code {e.returncode}")
        if e.stdout:
            print("\nOutput:")
            print(e.stdout)
        if e.stderr:
            print("\nError output:")
            print(e.stderr)
        return 1

    copy_required_files(dist_dir, project_dir)
    executable = dist_dir / ("homtomo.exe" if sys.platform == "win32" else "homtomo")
    print(f"\nExecutable created at: {executable}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
