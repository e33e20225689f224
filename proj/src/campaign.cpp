#include "foodwise/campaign.hpp"

#include "foodwise/error.hpp"

namespace foodwise {

void CampaignConfig::validate() const {
  if (!prereg_start.ok() || !start_date.ok() || !end_date.ok()) {
    throw Error(Errc::BadConfig, "campaign dates must be valid calendar dates");
  }
  if (!(prereg_start <= start_date && start_date < end_date)) {
    throw Error(Errc::BadConfig, "campaign needs prereg_start <= start_date < end_date");
  }
  if (tips.empty()) throw Error(Errc::BadConfig, "campaign needs at least one tip");
  try {
    CampaignZone::load(timezone);
  } catch (const Error& e) {
    throw Error(Errc::BadConfig, e.what(), "timezone");
  }
  badge_rules.validate();
  severity_thresholds.validate();
}

CampaignConfig default_campaign() {
  using namespace std::chrono;
  CampaignConfig c;
  c.prereg_start = year{2023} / March / 13;
  c.start_date = year{2023} / March / 20;
  c.end_date = year{2023} / April / 3;
  c.timezone = "Asia/Hong_Kong";
  c.tips = {
      "Consider your appetite before ordering",
      "Choose the 'less rice' option",
      "Kindly ask the staff to give you less food",
      "Bring a lunch box to pack excess food",
  };
  return c;
}

}  // namespace foodwise
