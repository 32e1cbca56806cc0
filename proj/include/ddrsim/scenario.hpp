#ifndef DDRSIM_SCENARIO_HPP
#define DDRSIM_SCENARIO_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddrsim/propagate.hpp"

namespace ddr {

/// Input probe beam: a single Gaussian covering the control structure.
struct ProbeBeam {
    double waist = 0.025;    ///< cm
    double amplitude = 0.01; ///< gamma units (weak-probe regime)
    double center_x = 0.0;
    double center_y = 0.0;
};

/// Detuning sweep for spectrum runs (delta1, gamma units).
struct SweepConfig {
    double from = -3.0;
    double to = 3.0;
    int count = 1201;
};

/// Output artifact selection and snapshot plan.
struct OutputConfig {
    std::vector<double> snapshots{0.0};
    std::vector<std::string> artifacts{"probe_cut", "control_cut", "metrics"};
};

struct ScenarioConfig {
    std::string name = "custom";
    AtomicParams atomic{};
    DriveConfig drive{};
    ControlProfile control_profile{{GaussianPeak{}}}; ///< one centered 100 um peak
    ProbeBeam probe{};
    TransverseGrid grid{};
    PropagationConfig propagation{};
    std::optional<SweepConfig> sweep; ///< present -> spectrum run
    OutputConfig outputs{};
    std::vector<std::string> defaulted; ///< values a preset filled from module defaults

    bool is_spectrum() const { return sweep.has_value(); }
    void validate() const; // throws ConfigInvalid with the offending path
};

struct SnapshotSummary {
    double z = 0.0;
    BeamMetrics probe_metrics;
    BeamMetrics control_metrics;
    std::string probe_class;
    std::string control_class;
    double probe_transmission = -1.0;
};

struct RunSummary {
    std::string scenario;
    std::string config_json;         ///< fully resolved config (re-runnable)
    std::vector<SnapshotSummary> snapshots;
    double wall_seconds = 0.0;
    double power_drift_per_step = 0.0; ///< max relative per-step power change
    std::string transmission_reference = "input probe power at z=0";
    std::vector<std::string> outputs;  ///< files written
};

/// Named figure-reproduction presets (fig2_eit ... fig8_switching).
std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);

/// Parse/serialize the JSON config document. Unknown keys are rejected with
/// their path. `base` supplies defaults (e.g. a preset being overridden).
ScenarioConfig parse_config(const std::string& json_text,
                            const std::optional<ScenarioConfig>& base = std::nullopt);
std::string config_to_json(const ScenarioConfig& cfg);

/// Execute a scenario and write its artifacts under out_dir.
RunSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Exporters. Delimited text for cuts/spectra, raw little-endian interleaved
/// re/im float64 (row-major) plus a JSON sidecar for 2D grids.
void export_cut(const ComplexField2D& field, const Cut& cut, const std::filesystem::path& file,
                const std::string& title);
void export_spectrum(std::span<const double> delta1, std::span<const complexd> chi,
                     const std::filesystem::path& file, const std::string& title);
void export_grid(const ComplexField2D& field, const std::filesystem::path& stem);
ComplexField2D import_grid(const std::filesystem::path& stem);

} // namespace ddr

#endif
